// Runs the acceptance criteria and prints one PASS/FAIL line for each.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "kpcloud/cloud.h"
#include "kpcloud/compressed_lm.h"
#include "kpcloud/evaluate.h"
#include "kpcloud/mph.h"
#include "kpcloud/pipeline.h"
#include "kpcloud/synthetic.h"
#include "oracles/candidate_oracle.h"
#include "oracles/katz_oracle.h"
#include "oracles/reported_results.h"
#include "oracles/split_oracle.h"
#include "support.h"

using namespace kpcloud;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args, const std::string& log) {
  const auto cmd = std::string("\"") + KPCLOUD_CLI + "\" " + args + " >\"" + log + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 1
Outcome metric_identities() {
  double worst_f1 = 0.0, worst_p = 0.0;
  std::size_t rows = 0;
  for (const auto* table : {&oracle::kC45Results, &oracle::kCartResults}) {
    for (const auto& r : *table) {
      worst_f1 = std::max(worst_f1, std::abs(100 * f1_score(r.p / 100, r.r / 100) - r.f1));
      worst_p = std::max(worst_p, std::abs(100 * r.identified / r.n - r.p));
      ++rows;
    }
  }
  return {worst_f1 <= 0.02 && worst_p <= 0.02,
          format("%zu rows, max |F1 err| %.4f, max |P err| %.4f", rows, worst_f1, worst_p)};
}

// 2
Outcome planted_recovery() {
  const auto& res = testing::pt();
  const auto sc = make_synthetic_corpus({}, res);
  const auto set = FeatureSet::parse("base+f1+f2+f3+f4");
  double f1[2] = {0, 0};
  const Algorithm algs[2] = {Algorithm::Cart, Algorithm::C45};
  for (int i = 0; i < 2; ++i) {
    BaggingParams bp;
    bp.tree.algorithm = algs[i];
    bp.threads = 4;
    const auto tp = train_pipeline(sc.train, res, nullptr, set, bp);
    const Extractor ex{tp.model, FeatureContext{res, tp.idf, nullptr, set}};
    f1[i] = evaluate(sc.test, ex, 10, 4).macro.f1;
  }
  return {f1[0] >= 0.90 && f1[1] >= 0.85,
          format("%zu/%zu docs, %zu+%zu words; CART F1 %.4f (>= 0.90), C4.5 F1 %.4f (>= 0.85)", sc.train.size(),
                 sc.test.size(), sc.train_words, sc.test_words, f1[0], f1[1])};
}

// 3
Outcome split_oracle() {
  std::mt19937_64 rng(2024);
  std::size_t agree = 0, total = 0;
  for (int d = 0; d < 50; ++d) {
    const auto data = oracle::random_dataset(rng, 200, 12, false);
    for (const auto alg : {Algorithm::Cart, Algorithm::C45}) {
      TreeParams p;
      p.algorithm = alg;
      p.prune = false;
      const auto tree = DecisionTree::train(data, p);
      const auto want = oracle::best_split(data, alg == Algorithm::C45, p.min_leaf);
      const auto& root = tree.nodes().front();
      const bool ok = want.valid ? !root.is_leaf() && static_cast<std::size_t>(root.feature) == want.feature &&
                                       root.threshold == want.threshold
                                 : root.is_leaf();
      agree += ok;
      ++total;
    }
  }
  return {agree == total, format("%zu/%zu root splits equal the exhaustive search (50 datasets x 2 trainers)", agree,
                                 total)};
}

// 4
Outcome lm_normalization() {
  const auto m = ArpaModel::load(testing::data_path("tiny4.arpa"));
  std::size_t entries = 0;
  for (int k = 1; k <= m.max_order(); ++k) entries += m.count(k);
  const auto vocab = m.vocabulary();
  double worst = 0.0;
  std::size_t histories = 0;
  for (const auto& h : oracle::all_histories(vocab, 3)) {
    worst = std::max(worst, std::abs(oracle::conditional_mass(m, vocab, h) - 1.0));
    ++histories;
  }
  return {entries <= 100 && m.max_order() == 4 && worst <= 1e-3,
          format("%zu entries, %zu histories, max |sum - 1| %.2e", entries, histories, worst)};
}

// 5
Outcome mph_store() {
  std::vector<std::string> keys;
  for (int i = 0; i < 100000; ++i) keys.push_back("key-" + std::to_string(i));
  const auto h = MinimalPerfectHash::build(keys);
  std::vector<std::uint8_t> hit(keys.size(), 0);
  bool bijective = true;
  for (const auto& k : keys) {
    const auto s = h(k);
    if (s >= keys.size() || hit[s]++) bijective = false;
  }

  const auto arpa = make_synthetic_lm({});
  const auto text = arpa.to_arpa_text();
  const auto c = CompressedNGramModel::compress(arpa, {.fingerprint_bits = 12});
  bool within_bin = true;
  std::size_t stored = 0;
  for (int k = 1; k <= arpa.max_order(); ++k) {
    for (const auto& [key, e] : arpa.ngrams(k)) {
      const auto v = c.lookup_key(key, static_cast<std::size_t>(k));
      if (!v || std::abs(*v - e.log10_prob) > c.bin_width(k) + 1e-9) within_bin = false;
      ++stored;
    }
  }

  const std::size_t queries = 1000000;
  std::size_t accepted = 0;
  std::mt19937_64 rng(77);
  for (std::size_t i = 0; i < queries; ++i) {
    const auto order = 1 + i % 4;
    std::string q = "nk" + std::to_string(rng());
    for (std::size_t w = 1; w < order; ++w) q += " q" + std::to_string(rng() % 100000);
    accepted += c.lookup_key(q, order).has_value();
  }
  const double p = std::ldexp(1.0, -12);
  const double rate = static_cast<double>(accepted) / queries;
  const double sigma = std::sqrt(p * (1 - p) / queries);
  const CompressionReport rep{text.size(), c.byte_size()};
  const bool far_ok = std::abs(rate - p) <= 3 * sigma;
  return {bijective && within_bin && far_ok && rep.ratio() <= 0.20,
          format("bijective %s (100000 keys); %zu n-grams within one bin %s; false accepts %.3e vs 2^-12 = %.3e "
                 "(3 sigma %.1e); size %zu / %zu = %.4f",
                 bijective ? "yes" : "no", stored, within_bin ? "yes" : "no", rate, p, 3 * sigma,
                 rep.compressed_bytes, rep.arpa_bytes, rep.ratio())};
}

// 6
Outcome candidate_soundness() {
  std::mt19937_64 rng(606);
  const auto& res = testing::pt();
  const std::vector<std::string> words = {"o", "Governo", "de", "Portugal", "anunciou", "medidas", "a",
                                          "crise", "do", "euro", "e", "que", "Banco", "Central", "Europeu"};
  std::size_t violations = 0, mismatches = 0, oracle_checked = 0, candidates = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<Token> tokens;
    if (iter % 2 == 0) {
      tokens = oracle::random_tokens(rng, rng() % 120);
    } else {
      std::string text;
      const auto n = rng() % 120;
      for (std::size_t i = 0; i < n; ++i) {
        text += words[rng() % words.size()];
        text += rng() % 7 == 0 ? ". " : " ";
      }
      tokens = tokenize(text, res);
    }
    const auto cands = generate_candidates(tokens);
    candidates += cands.size();
    for (const auto& c : cands) {
      for (const auto& o : c.occurrences) {
        bool bad = o.end - o.begin > 5 || o.end <= o.begin || tokens[o.begin].is_stopword || tokens[o.end - 1].is_stopword;
        for (auto k = o.begin; k + 1 < o.end; ++k) bad = bad || tokens[k].sentence_boundary_after;
        violations += bad;
      }
    }
    if (tokens.size() <= 50) {
      ++oracle_checked;
      mismatches += oracle::as_map(cands) != oracle::enumerate_spans(tokens);
    }
  }
  return {violations == 0 && mismatches == 0,
          format("1000 sequences, %zu candidates, %zu rule violations; %zu/%zu short sequences equal the oracle",
                 candidates, violations, oracle_checked - mismatches, oracle_checked)};
}

// 7
Outcome determinism() {
  testing::TempDir dir("acceptance");
  SyntheticCorpusOptions o;
  o.train_docs = 40;
  o.test_docs = 2;
  const auto sc = make_synthetic_corpus(o, testing::pt());
  save_corpus(sc.train, dir.file("train.json"));
  const auto log = dir.file("log.txt");
  const std::string train = "train " + dir.file("train.json") + " --features base+f1+f2+f3+f4 --bags 6 --seed 17 -o ";
  if (run_cli(train + dir.file("m1.bin"), log) != 0) return {false, "train failed: " + slurp(log)};
  if (run_cli(train + dir.file("m2.bin"), log) != 0) return {false, "train failed: " + slurp(log)};
  const auto m1 = slurp(dir.file("m1.bin"));
  const bool same_model = !m1.empty() && m1 == slurp(dir.file("m2.bin"));
  const std::string cloud = "cloud " + dir.file("train.json") + " -m " + dir.file("m1.bin") +
                            " --now 2011-05-03T12:00:00Z --threads 3 -o ";
  if (run_cli(cloud + dir.file("c1.html"), log) != 0) return {false, "cloud failed: " + slurp(log)};
  if (run_cli(cloud + dir.file("c2.html"), log) != 0) return {false, "cloud failed: " + slurp(log)};
  const auto c1 = slurp(dir.file("c1.html"));
  const bool same_html = !c1.empty() && c1 == slurp(dir.file("c2.html"));
  return {same_model && same_html, format("model files identical %s (%zu bytes); cloud HTML identical %s (%zu bytes)",
                                          same_model ? "yes" : "no", m1.size(), same_html ? "yes" : "no", c1.size())};
}

// 8
Outcome cloud_constants() {
  using namespace std::chrono_literals;
  const CloudConfig cfg;
  bool ok = cfg.window_hours == 6.0 && cfg.top_news == 10 && cfg.keyphrases_per_news == 10 && cfg.cloud_size == 20;
  const auto now = parse_rfc3339("2011-05-03T21:00:00Z");

  std::vector<NewsDocument> docs;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    NewsDocument d;
    d.id = format("n%02d", i);
    d.channel = i % 2 ? "SIC" : "RTP1";
    d.program = "Telejornal";
    d.broadcast_time = now - std::chrono::minutes(11 * i);
    d.position_in_program = static_cast<std::size_t>(i % 5);
    docs.push_back(d);
  }
  for (const auto offset : {-1s, 0s, 1s}) {
    NewsDocument d;
    d.id = format("edge%+lld", static_cast<long long>(offset.count()));
    d.channel = "TVI";
    d.program = "Jornal das 8";
    d.broadcast_time = now - 6h + offset;
    docs.push_back(d);
  }
  std::vector<NewsItem> items;
  for (const auto& d : docs) {
    NewsItem it{&d, {}};
    for (int k = 0; k < 15; ++k) {
      RankedKeyphrase r;
      r.surface = "termo" + std::to_string(rng() % 60);
      r.normalized = normalize_phrase(r.surface, testing::pt());
      r.tf = 1 + rng() % 3;
      r.rank = it.keyphrases.size() + 1;
      it.keyphrases.push_back(r);
    }
    items.push_back(std::move(it));
  }

  const bool boundary = in_window(now - 6h, now, 6) && in_window(now - 6h + 1s, now, 6) &&
                        !in_window(now - 6h - 1s, now, 6);
  CloudConfig everything = cfg;
  everything.top_news = 1000;
  std::unordered_set<std::string> eligible;
  for (const auto& s : select_top_news(items, now, everything)) eligible.insert(s.item->doc->id);
  const bool window_ok = boundary && eligible.contains("edge+0") && eligible.contains("edge+1") &&
                         !eligible.contains("edge-1") && eligible.size() == 32;

  const auto top = select_top_news(items, now, cfg);
  const auto cloud = build_cloud(std::span<const ScoredNews>(top), cfg, now);
  std::unordered_set<std::string> top_ids;
  for (const auto& s : top) top_ids.insert(s.item->doc->id);
  bool sourced = true;
  for (const auto& e : cloud.entries) {
    for (const auto& id : e.doc_ids) {
      if (!top_ids.contains(id)) sourced = false;
      const auto& item = *std::find_if(items.begin(), items.end(), [&](const NewsItem& it) { return it.doc->id == id; });
      bool in_top10 = false;
      std::unordered_set<std::string> seen;
      for (const auto& kp : item.keyphrases) {
        if (seen.size() == 10) break;
        seen.insert(kp.normalized);
        if (kp.normalized == e.normalized) in_top10 = true;
      }
      sourced = sourced && in_top10;
    }
  }
  ok = ok && window_ok && top.size() == 10 && cloud.entries.size() <= 20 && sourced;
  return {ok, format("defaults 6h/10/10/20; %zu eligible of %zu (age 6h+1s excluded, ages 6h and 6h-1s kept); "
                     "%zu top news; %zu entries, all from top-10 keyphrases of top news",
                     eligible.size(), docs.size(), top.size(), cloud.entries.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric identities", metric_identities},     {"planted keyphrase recovery", planted_recovery},
      {"split search oracle", split_oracle},         {"LM normalization", lm_normalization},
      {"MPH store", mph_store},                      {"candidate rule soundness", candidate_soundness},
      {"determinism", determinism},                  {"cloud constants", cloud_constants},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %zu. %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
