#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "json.hpp"

#include "kpcloud/binary_io.h"
#include "kpcloud/cloud.h"
#include "kpcloud/compressed_lm.h"
#include "kpcloud/errors.h"
#include "kpcloud/evaluate.h"
#include "kpcloud/hash.h"
#include "kpcloud/parallel.h"
#include "kpcloud/pipeline.h"

namespace {

using namespace kpcloud;

struct Common {
  std::string language = "pt";
  std::string stopwords;
  std::string ne_lexicon;
  std::string pos_lexicon;
  std::string lm;
  std::size_t threads = 1;
  bool json = false;
};

void add_common(CLI::App& app, Common& c, bool with_lm) {
  app.add_option("--config", "key=value file (keys are long option names); command-line flags override it")
      ->check(CLI::ExistingFile);
  app.add_option("--language", c.language, "Language profile: pt or en")
      ->check(CLI::IsMember({"pt", "en", "portuguese", "english"}))
      ->capture_default_str();
  app.add_option("--stopwords", c.stopwords, "Stopword list (one per line), replaces the builtin list")
      ->check(CLI::ExistingFile);
  app.add_option("--ne-lexicon", c.ne_lexicon, "Named-entity lexicon, replaces the builtin one")
      ->check(CLI::ExistingFile);
  app.add_option("--pos-lexicon", c.pos_lexicon, "POS lexicon (word<TAB>tag), replaces the builtin one")
      ->check(CLI::ExistingFile);
  if (with_lm) {
    app.add_option("--lm", c.lm, "4-gram LM for f5: ARPA text or compressed binary")->check(CLI::ExistingFile);
  }
  app.add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_flag("--json", c.json, "Machine-readable output");
}

LanguageResources load_resources(const Common& c) {
  return LanguageResources::load(parse_language(c.language), c.stopwords, c.ne_lexicon, c.pos_lexicon);
}

std::unique_ptr<PhraseScorer> load_lm(const Common& c) {
  if (c.lm.empty()) return nullptr;
  return load_phrase_scorer(c.lm);
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Appends `--key value` for every config-file entry whose flag is absent from
// the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) return args;  // the option's own validator reports it
  const auto given = [&](const std::string& flag) {
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ConversionError("config line '" + line + "' is not key=value");
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    const std::string flag = (key.size() == 1 ? "-" : "--") + key;
    if (key == "config" || given(flag)) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value != "false") {
      extra.push_back(flag);
      std::istringstream words(value);
      std::string w;
      bool any = false;
      while (words >> w) {
        extra.push_back(w);
        any = true;
      }
      if (!any) extra.pop_back();
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::string idf_path_for(const std::string& model) { return model + ".idf"; }

// ---- train ----

struct TrainArgs {
  Common common;
  std::string corpus;
  std::string model_out;
  std::string features = "all";
  std::string algorithm = "cart";
  std::size_t n_bags = 10;
  std::uint64_t seed = 42;
  std::size_t min_leaf = 2;
  std::size_t max_depth = 0;
  bool no_prune = false;
  double confidence = 0.25;
  double cart_alpha = 0.0;
  double negative_ratio = 0.0;
};

int run_train(const TrainArgs& a) {
  const auto res = load_resources(a.common);
  const auto lm = load_lm(a.common);
  const auto set = FeatureSet::parse(a.features);
  const auto corpus = load_corpus(a.corpus, Split::Train, res);
  BaggingParams p;
  p.tree.algorithm = parse_algorithm(a.algorithm);
  p.tree.min_leaf = a.min_leaf;
  p.tree.max_depth = a.max_depth;
  p.tree.prune = !a.no_prune;
  p.tree.confidence = a.confidence;
  p.tree.cart_alpha = a.cart_alpha;
  p.n_bags = a.n_bags;
  p.seed = a.seed;
  p.negative_ratio = a.negative_ratio;
  p.threads = a.common.threads;
  const auto tp = train_pipeline(corpus, res, lm.get(), set, p);
  const auto bytes = tp.model.serialize();
  write_file_bytes(a.model_out, bytes);
  tp.idf.save(idf_path_for(a.model_out));
  const auto hash = fnv1a64(std::string_view(bytes.data(), bytes.size()));
  if (a.common.json) {
    nlohmann::ordered_json j = {{"model", a.model_out},
                                {"idf", idf_path_for(a.model_out)},
                                {"documents", tp.documents},
                                {"instances", tp.instances},
                                {"positives", tp.positives},
                                {"positive_rate", tp.positive_rate()},
                                {"gold_total", tp.gold_total},
                                {"gold_covered", tp.gold_covered},
                                {"model_bytes", bytes.size()},
                                {"model_hash", hex64(hash)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("documents\t%zu\ninstances\t%zu\npositives\t%zu\npositive_rate\t%.6f\n", tp.documents,
                tp.instances, tp.positives, tp.positive_rate());
    std::printf("gold_covered\t%zu/%zu\nmodel\t%s (%zu bytes)\nmodel_hash\t%s\n", tp.gold_covered, tp.gold_total,
                a.model_out.c_str(), bytes.size(), hex64(hash).c_str());
  }
  return 0;
}

// ---- shared model loading for extract / evaluate / cloud ----

struct ModelArgs {
  std::string model;
  std::string idf;
  std::string features;  // empty: whatever the model was trained on
};

void add_model_options(CLI::App& app, ModelArgs& m) {
  app.add_option("-m,--model", m.model, "Trained model file")->required()->check(CLI::ExistingFile);
  app.add_option("--idf", m.idf, "IDF sidecar (default: <model>.idf)")->check(CLI::ExistingFile);
  app.add_option("--features", m.features, "Feature set; must match the model (default: the model's)");
}

struct LoadedModel {
  LanguageResources resources;
  std::unique_ptr<PhraseScorer> lm;
  BaggedTreeModel model;
  IdfTable idf;
  FeatureSet set;

  Extractor extractor() const { return Extractor{model, FeatureContext{resources, idf, lm.get(), set, {}}}; }
};

LoadedModel load_model(const Common& c, const ModelArgs& m) {
  LoadedModel out{load_resources(c), load_lm(c), BaggedTreeModel::load(m.model, kFeatureSchemaVersion), {}, {}};
  out.idf = IdfTable::load(m.idf.empty() ? idf_path_for(m.model) : m.idf);
  out.set = m.features.empty() ? FeatureSet::from_mask(out.model.schema().feature_mask) : FeatureSet::parse(m.features);
  out.extractor().check_schema();
  return out;
}

Corpus load_input(const std::string& path, Split split, const LanguageResources& res, bool plain_text) {
  if (!plain_text) return load_corpus(path, split, res);
  const auto bytes = read_file_bytes(path);
  NewsDocument doc;
  doc.id = std::filesystem::path(path).filename().string();
  doc.text.assign(bytes.begin(), bytes.end());
  doc.tokens = tokenize(doc.text, res);
  Corpus c;
  c.documents.push_back(std::move(doc));
  return c;
}

// ---- extract ----

struct ExtractArgs {
  Common common;
  ModelArgs model;
  std::string input;
  std::size_t n = 10;
  bool text = false;
};

int run_extract(const ExtractArgs& a) {
  const auto lm = load_model(a.common, a.model);
  const auto corpus = load_input(a.input, Split::Unlabeled, lm.resources, a.text);
  const auto ex = lm.extractor();
  std::vector<std::vector<RankedKeyphrase>> results(corpus.size());
  parallel_for(corpus.size(), a.common.threads, [&](std::size_t i) {
    const auto ranked = rank_candidates(corpus.documents[i], ex);
    results[i] = extract_top_n(ranked, a.n);
  });
  if (a.common.json) {
    auto docs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto list = nlohmann::ordered_json::array();
      for (const auto& r : results[i]) {
        list.push_back({{"rank", r.rank}, {"score", r.score}, {"phrase", r.surface}, {"normalized", r.normalized}});
      }
      docs.push_back({{"id", corpus.documents[i].id}, {"keyphrases", std::move(list)}});
    }
    std::cout << nlohmann::ordered_json{{"n", a.n}, {"documents", std::move(docs)}}.dump(2) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus.size() > 1) std::printf("# %s\n", corpus.documents[i].id.c_str());
    for (const auto& r : results[i]) std::printf("%zu\t%.6f\t%s\n", r.rank, r.score, r.surface.c_str());
  }
  return 0;
}

// ---- evaluate ----

struct EvaluateArgs {
  Common common;
  ModelArgs model;
  std::string corpus;
  std::size_t n = 10;
  bool sweep = false;
  std::vector<std::size_t> sweep_values = {10, 20, 30, 35, 40};
  std::string json_out;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto lm = load_model(a.common, a.model);
  const auto corpus = load_corpus(a.corpus, Split::Test, lm.resources);
  const auto ex = lm.extractor();
  std::vector<std::size_t> ns = a.sweep ? a.sweep_values : std::vector<std::size_t>{a.n};
  const auto reports = evaluate_sweep(corpus, ex, ns, a.common.threads);
  const auto json = report_to_json(reports);
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out, std::ios::binary);
    out << json << "\n";
    if (!out) throw IoError("cannot write " + a.json_out);
  }
  if (a.common.json) {
    std::cout << json << "\n";
  } else {
    std::cout << format_report_table(reports);
  }
  return 0;
}

// ---- compress-lm ----

struct CompressArgs {
  Common common;
  std::string arpa;
  std::string out;
  unsigned fp_bits = 12;
  unsigned q_bits = 8;
  double penalty = -0.7;
  std::uint64_t seed = MinimalPerfectHash::Options{}.seed;
};

int run_compress(const CompressArgs& a) {
  const auto model = ArpaModel::load(a.arpa);
  CompressOptions o;
  o.fingerprint_bits = a.fp_bits;
  o.quant_bits = a.q_bits;
  o.backoff_penalty = a.penalty;
  o.mph.seed = a.seed;
  const auto compressed = CompressedNGramModel::compress(model, o);
  compressed.save(a.out);
  CompressionReport rep;
  rep.arpa_bytes = std::filesystem::file_size(a.arpa);
  rep.compressed_bytes = std::filesystem::file_size(a.out);
  if (a.common.json) {
    nlohmann::ordered_json counts = nlohmann::ordered_json::array();
    for (int k = 1; k <= compressed.max_order(); ++k) counts.push_back(compressed.count(k));
    std::cout << nlohmann::ordered_json{{"arpa_bytes", rep.arpa_bytes},
                                        {"compressed_bytes", rep.compressed_bytes},
                                        {"ratio", rep.ratio()},
                                        {"ngram_counts", counts},
                                        {"fingerprint_bits", a.fp_bits},
                                        {"quant_bits", a.q_bits}}
                     .dump(2)
              << "\n";
  } else {
    std::printf("arpa_bytes\t%llu\ncompressed_bytes\t%llu\nratio\t%.4f\n",
                static_cast<unsigned long long>(rep.arpa_bytes),
                static_cast<unsigned long long>(rep.compressed_bytes), rep.ratio());
  }
  return 0;
}

// ---- cloud ----

struct CloudArgs {
  Common common;
  ModelArgs model;
  std::string corpus;
  std::string out;
  std::string json_out;
  std::string now;
  std::string topic;
  CloudConfig cfg;
};

int run_cloud(CloudArgs a) {
  if (!a.topic.empty()) a.cfg.topic_filter = a.topic;
  a.cfg.validate();
  const Timestamp now = a.now.empty()
                            ? std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now())
                            : parse_rfc3339(a.now);
  const auto lm = load_model(a.common, a.model);
  const auto corpus = load_corpus(a.corpus, Split::Unlabeled, lm.resources);
  const auto ex = lm.extractor();

  std::vector<const NewsDocument*> eligible;
  for (const auto& d : corpus.documents) {
    if (a.cfg.topic_filter && d.topic != a.cfg.topic_filter) continue;
    if (in_window(d.broadcast_time, now, a.cfg.window_hours)) eligible.push_back(&d);
  }
  std::vector<NewsItem> items(eligible.size());
  parallel_for(eligible.size(), a.common.threads, [&](std::size_t i) {
    items[i].doc = eligible[i];
    const auto ranked = rank_candidates(*eligible[i], ex);
    items[i].keyphrases = extract_top_n(ranked, a.cfg.keyphrases_per_news);
  });
  const auto top = select_top_news(items, now, a.cfg);
  const auto cloud = build_cloud(top, a.cfg, now);
  render_cloud(cloud, a.out, a.cfg);
  const auto json = cloud_to_json(cloud);
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out, std::ios::binary);
    out << json << "\n";
    if (!out) throw IoError("cannot write " + a.json_out);
  }
  if (a.common.json) {
    std::cout << json << "\n";
  } else {
    std::printf("# %zu in window, %zu top news, %zu entries -> %s\n", eligible.size(), top.size(),
                cloud.entries.size(), a.out.c_str());
    for (const auto& e : cloud.entries) std::printf("%zu\t%s\n", e.count, e.phrase.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyphrase extraction and tag clouds for broadcast news"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a bagged decision-tree keyphrase model");
  add_common(*t, train.common, true);
  t->add_option("corpus", train.corpus, "Train corpus JSON")->required()->check(CLI::ExistingFile);
  t->add_option("-o,--model-out", train.model_out, "Model file to write (the IDF sidecar goes to <model>.idf)")
      ->required();
  t->add_option("--features", train.features, "base, all, or base+f1+f3 style list")->capture_default_str();
  t->add_option("--algorithm", train.algorithm, "cart or c45")
      ->check(CLI::IsMember({"cart", "c45", "c4.5"}))
      ->capture_default_str();
  t->add_option("--bags", train.n_bags, "Number of bagged trees")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--seed", train.seed, "Bootstrap seed")->capture_default_str();
  t->add_option("--min-leaf", train.min_leaf, "Minimum instances per split side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  t->add_option("--max-depth", train.max_depth, "Maximum tree depth (0 = unlimited)")->capture_default_str();
  t->add_flag("--no-prune", train.no_prune, "Disable C4.5 pessimistic pruning");
  t->add_option("--confidence", train.confidence, "C4.5 pruning confidence factor")
      ->check(CLI::Range(0.0001, 0.5))
      ->capture_default_str();
  t->add_option("--cart-alpha", train.cart_alpha, "CART cost-complexity parameter (0 = off)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  t->add_option("--negative-ratio", train.negative_ratio, "Negatives kept per positive in each bag (0 = all)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  ExtractArgs extract;
  auto* e = app.add_subcommand("extract", "Rank keyphrases of documents");
  add_common(*e, extract.common, true);
  add_model_options(*e, extract.model);
  e->add_option("input", extract.input, "Corpus or document JSON (or plain text with --text)")
      ->required()
      ->check(CLI::ExistingFile);
  e->add_option("-n", extract.n, "Keyphrases per document")->check(CLI::PositiveNumber)->capture_default_str();
  e->add_flag("--text", extract.text, "Input is a plain-text document");

  EvaluateArgs evaluate;
  auto* v = app.add_subcommand("evaluate", "Macro precision/recall/F1 against gold keyphrases");
  add_common(*v, evaluate.common, true);
  add_model_options(*v, evaluate.model);
  v->add_option("corpus", evaluate.corpus, "Test corpus JSON")->required()->check(CLI::ExistingFile);
  v->add_option("-n", evaluate.n, "Keyphrases extracted per document")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  v->add_flag("--sweep", evaluate.sweep, "Evaluate every cut-off in --sweep-values in one run");
  v->add_option("--sweep-values", evaluate.sweep_values, "Cut-offs for --sweep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  v->add_option("--json-out", evaluate.json_out, "Also write the JSON report to this file");

  CompressArgs compress;
  auto* c = app.add_subcommand("compress-lm", "Compress an ARPA model into the hashed binary store");
  add_common(*c, compress.common, false);
  c->add_option("arpa", compress.arpa, "ARPA text model")->required()->check(CLI::ExistingFile);
  c->add_option("-o,--out", compress.out, "Binary model to write")->required();
  c->add_option("-b,--fingerprint-bits", compress.fp_bits, "Fingerprint bits per entry")
      ->check(CLI::Range(8u, 16u))
      ->capture_default_str();
  c->add_option("-q,--quant-bits", compress.q_bits, "Quantization bits per value")
      ->check(CLI::Range(4u, 8u))
      ->capture_default_str();
  c->add_option("--penalty", compress.penalty, "Flat log10 back-off penalty")->capture_default_str();
  c->add_option("--seed", compress.seed, "Hash seed (change it if construction fails)")->capture_default_str();

  CloudArgs cloud;
  auto* k = app.add_subcommand("cloud", "Build the keyphrase cloud of the current top news");
  add_common(*k, cloud.common, true);
  add_model_options(*k, cloud.model);
  k->add_option("corpus", cloud.corpus, "News corpus JSON")->required()->check(CLI::ExistingFile);
  k->add_option("-o,--out", cloud.out, "HTML file to write")->required();
  k->add_option("--json-out", cloud.json_out, "Also write the cloud JSON to this file");
  k->add_option("--now", cloud.now, "Reference time, RFC 3339 (default: wall clock)");
  k->add_option("--topic", cloud.topic, "Restrict to one topic");
  k->add_option("--window-hours", cloud.cfg.window_hours, "Time window")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  k->add_option("--top-news", cloud.cfg.top_news, "Stories feeding the cloud")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  k->add_option("--keyphrases-per-news", cloud.cfg.keyphrases_per_news, "Keyphrases taken from each story")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  k->add_option("--cloud-size", cloud.cfg.cloud_size, "Entries in the cloud")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  k->add_option("--w-recency", cloud.cfg.weights.recency, "Recency weight")->capture_default_str();
  k->add_option("--w-position", cloud.cfg.weights.position, "In-program position weight")->capture_default_str();
  k->add_option("--w-duplication", cloud.cfg.weights.duplication, "Cross-channel duplication weight")
      ->capture_default_str();
  k->add_option("--duplicate-min-shared", cloud.cfg.duplicate_min_shared,
                "Shared keyphrases that mark two stories as duplicates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  k->add_option("--min-font", cloud.cfg.min_font, "Smallest font size (px)")->capture_default_str();
  k->add_option("--max-font", cloud.cfg.max_font, "Largest font size (px)")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  std::cerr << "# kpcloud " << chosen->get_name() << " effective config\n" << chosen->config_to_str(true, false);

  try {
    if (chosen == t) return run_train(train);
    if (chosen == e) return run_extract(extract);
    if (chosen == v) return run_evaluate(evaluate);
    if (chosen == c) return run_compress(compress);
    if (chosen == k) return run_cloud(cloud);
  } catch (const std::exception& err) {
    std::cerr << "kpcloud " << chosen->get_name() << ": error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
