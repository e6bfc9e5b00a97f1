#include "kpcloud/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "kpcloud/bagging.h"
#include "kpcloud/errors.h"
#include "kpcloud/utf8.h"

namespace kpcloud {

namespace {

constexpr std::string_view kConsonants = "bdfglmnprtvz";
constexpr std::string_view kVowels = "aeiou";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t n) { return uniform_below(gen_, n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(below(hi - lo + 1)); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

std::string capitalize(std::string_view word) {
  std::size_t pos = 0;
  const char32_t first = utf8::decode(word, pos);
  std::string out;
  utf8::append(out, utf8::to_upper(first));
  out.append(word.substr(pos));
  return out;
}

std::vector<std::string> stopword_pool(const LanguageResources& res) {
  static constexpr std::string_view preferred[] = {"de", "a",  "o",  "que", "e",   "do",  "da",  "em", "um", "para",
                                                   "com", "não", "uma", "os", "no",  "se",  "na",  "por", "as", "the",
                                                   "of", "and", "to", "in",  "is",  "that", "for", "on"};
  std::vector<std::string> pool;
  for (const auto w : preferred) {
    if (res.stopwords.contains(std::string(w))) pool.emplace_back(w);
  }
  if (pool.size() < 5) {
    std::vector<std::string> all(res.stopwords.begin(), res.stopwords.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size() && pool.size() < 20; ++i) pool.push_back(all[i]);
  }
  if (pool.empty()) throw ValidationError("language resources have no stopwords");
  return pool;
}

// Draws fresh words whose stem is the word itself and collides with nothing
// drawn before.
class WordFactory {
 public:
  WordFactory(const LanguageResources& res) : res_(res) {}

  std::string fresh(std::uint64_t salt, std::string_view suffix) {
    for (;;) {
      std::string w = pseudo_word(next_[salt]++, salt);
      w.append(suffix);
      if (res_.stopwords.contains(w)) continue;
      const auto s = stem(w, res_);
      if (s != w || !stems_.insert(s).second) continue;
      return w;
    }
  }

 private:
  const LanguageResources& res_;
  std::unordered_set<std::string> stems_;
  std::unordered_map<std::uint64_t, std::uint64_t> next_;
};

}  // namespace

std::string pseudo_word(std::uint64_t index, std::uint64_t salt) {
  const std::uint64_t base = kConsonants.size() * kVowels.size();
  const std::uint64_t block = base * base * base;
  std::uint64_t x = index + salt * 1000003ULL;
  x = (x / block) * block + (x % block) * 7919 % block;
  std::string out;
  int syllables = 0;
  while (syllables < 3 || x > 0) {
    const auto s = x % base;
    x /= base;
    out.push_back(kConsonants[s / kVowels.size()]);
    out.push_back(kVowels[s % kVowels.size()]);
    ++syllables;
  }
  return out;
}

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusOptions& o, const LanguageResources& res) {
  if (o.min_tf < 1 || o.max_tf < o.min_tf) throw ValidationError("synthetic corpus needs 1 <= min_tf <= max_tf");
  if (o.words_per_doc <= o.word_jitter) throw ValidationError("word_jitter must be below words_per_doc");
  Rng rng(o.seed);
  WordFactory words(res);
  const auto stops = stopword_pool(res);
  std::vector<std::string> filler;
  for (std::size_t i = 0; i < o.filler_vocabulary; ++i) filler.push_back(words.fresh(2, "r"));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < o.distractor_names; ++i) names.push_back(capitalize(words.fresh(1, "n")));

  static constexpr std::string_view channels[] = {"RTP1", "SIC", "TVI", "RTPN"};
  static constexpr std::string_view programs[] = {"Telejornal", "Jornal da Noite", "Jornal das 8", "Bom Dia"};
  static constexpr std::string_view topics[] = {"economia", "politica", "desporto", "sociedade"};
  const Timestamp start = parse_rfc3339(o.start_time);

  SyntheticCorpus out;
  out.train.split = Split::Train;
  out.test.split = Split::Test;
  const std::size_t total_docs = o.train_docs + o.test_docs;
  for (std::size_t d = 0; d < total_docs; ++d) {
    const bool is_train = d < o.train_docs;
    const std::size_t length = o.words_per_doc - o.word_jitter + rng.below(2 * o.word_jitter + 1);
    const std::size_t tokens_needed = o.gold_per_doc * o.max_tf;
    if (tokens_needed * 2 > length) throw ValidationError("documents too short for the planted keyphrases");
    std::vector<std::string> slots(length);
    std::vector<std::string> gold;
    const auto early_end = std::max<std::size_t>(1, static_cast<std::size_t>(o.early_fraction * length));
    const auto free_slot = [&](std::size_t lo, std::size_t hi) {
      for (;;) {
        const auto s = lo + rng.below(hi - lo);
        if (slots[s].empty()) return s;
      }
    };
    for (std::size_t g = 0; g < o.gold_per_doc; ++g) {
      const auto word = capitalize(words.fresh(0, "k"));
      gold.push_back(word);
      const auto tf = rng.between(o.min_tf, o.max_tf);
      slots[free_slot(0, early_end)] = word;
      for (std::size_t k = 1; k < tf; ++k) slots[free_slot(0, length)] = word;
    }
    for (auto& s : slots) {
      if (!s.empty()) continue;
      const double u = rng.unit();
      if (u < o.distractor_rate) {
        s = names[rng.below(names.size())];
      } else if (u < o.distractor_rate + o.stopword_rate) {
        s = stops[rng.below(stops.size())];
      } else {
        const double z = rng.unit();
        s = filler[static_cast<std::size_t>(z * z * static_cast<double>(filler.size()))];
      }
    }

    std::string text;
    std::size_t i = 0;
    while (i < length) {
      const auto sentence = std::min(length - i, rng.between(8, 14));
      for (std::size_t k = 0; k < sentence; ++k, ++i) {
        if (!text.empty()) text.push_back(' ');
        text += k == 0 ? capitalize(slots[i]) : slots[i];
      }
      text.push_back('.');
    }

    NewsDocument doc;
    char id[32];
    std::snprintf(id, sizeof id, "%s-%03zu", is_train ? "train" : "test", is_train ? d : d - o.train_docs);
    doc.id = id;
    doc.channel = std::string(channels[d % std::size(channels)]);
    doc.program = std::string(programs[d % std::size(programs)]);
    doc.broadcast_time = start + std::chrono::minutes(15 * static_cast<long>(d));
    doc.position_in_program = (d / std::size(channels)) % 6;
    doc.topic = std::string(topics[(d / 3) % std::size(topics)]);
    doc.text = std::move(text);
    doc.tokens = tokenize(doc.text, res);
    doc.gold_keyphrases = std::move(gold);
    (is_train ? out.train_words : out.test_words) += doc.word_count();
    (is_train ? out.train : out.test).documents.push_back(std::move(doc));
  }
  validate_corpus(out.train);
  validate_corpus(out.test);
  return out;
}

// ---- language model ----

namespace {

using Key = std::vector<std::uint32_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::uint64_t h = 0x84222325ULL;
    for (const auto w : k) h = (h ^ w) * 0x100000001B3ULL;
    return static_cast<std::size_t>(h);
  }
};

struct Prob {
  double lp = 0.0;   // log10 prob
  double bow = 0.0;  // log10 back-off
};

using Table = std::unordered_map<Key, Prob, KeyHash>;

double round6(double v) { return std::round(v * 1e6) / 1e6; }

// Katz estimate over the tables built so far.
double katz(const std::vector<Table>& orders, std::span<const std::uint32_t> history, std::uint32_t w) {
  Key key(history.begin(), history.end());
  key.push_back(w);
  if (const auto it = orders[key.size() - 1].find(key); it != orders[key.size() - 1].end()) return it->second.lp;
  if (history.empty()) return kLogProbFloor;
  const Key ctx(history.begin(), history.end());
  double bow = 0.0;
  if (const auto it = orders[ctx.size() - 1].find(ctx); it != orders[ctx.size() - 1].end()) bow = it->second.bow;
  return bow + katz(orders, history.subspan(1), w);
}

}  // namespace

ArpaModel make_synthetic_lm(const SyntheticLmOptions& o) {
  if (o.vocabulary < 2) throw ValidationError("synthetic LM needs at least 2 words");
  Rng rng(o.seed);
  std::vector<std::string> vocab;
  if (o.with_unk) vocab.emplace_back("<unk>");
  for (std::size_t i = 0; vocab.size() < o.vocabulary; ++i) vocab.push_back(pseudo_word(i, 3));
  const auto V = static_cast<std::uint32_t>(vocab.size());

  std::vector<Table> orders(4);
  {
    std::vector<double> weight(V);
    double sum = 0.0;
    for (auto& w : weight) {
      const double u = rng.unit();
      w = 0.02 + u * u * u;
      sum += w;
    }
    for (std::uint32_t i = 0; i < V; ++i) orders[0][{i}] = {round6(std::log10(weight[i] / sum)), 0.0};
  }

  for (std::size_t k = 2; k <= 4; ++k) {
    const std::size_t target = o.higher[k - 2];
    const auto& lower = orders[k - 2];
    std::vector<Key> histories;
    histories.reserve(lower.size());
    for (const auto& [key, p] : lower) histories.push_back(key);
    std::sort(histories.begin(), histories.end());

    std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> continuations;
    std::size_t made = 0;
    for (std::size_t attempts = 0; made < target && attempts < target * 20; ++attempts) {
      const auto& h = histories[rng.below(histories.size())];
      auto& cont = continuations[h];
      if (cont.size() + 1 >= V) continue;
      const auto w = static_cast<std::uint32_t>(rng.below(V));
      if (std::find(cont.begin(), cont.end(), w) != cont.end()) continue;
      cont.push_back(w);
      ++made;
    }

    std::vector<Key> ordered;
    ordered.reserve(continuations.size());
    for (const auto& [h, c] : continuations) ordered.push_back(h);
    std::sort(ordered.begin(), ordered.end());
    for (const auto& h : ordered) {
      auto cont = continuations[h];
      if (cont.empty()) continue;
      std::sort(cont.begin(), cont.end());
      const double beta = o.min_backoff_mass + rng.unit() * (o.max_backoff_mass - o.min_backoff_mass);
      std::vector<double> weight(cont.size());
      double sum = 0.0;
      for (auto& w : weight) {
        w = 0.05 + rng.unit();
        sum += w;
      }
      double seen = 0.0;
      double seen_lower = 0.0;
      const std::span<const std::uint32_t> shorter = std::span<const std::uint32_t>(h).subspan(1);
      for (std::size_t i = 0; i < cont.size(); ++i) {
        Key key = h;
        key.push_back(cont[i]);
        const double lp = round6(std::log10((1.0 - beta) * weight[i] / sum));
        orders[k - 1][key] = {lp, 0.0};
        seen += std::pow(10.0, lp);
        seen_lower += std::pow(10.0, katz(orders, shorter, cont[i]));
      }
      orders[k - 2][h].bow = round6(std::log10((1.0 - seen) / (1.0 - seen_lower)));
    }
  }

  std::vector<ArpaModel::OrderMap> maps(4);
  for (std::size_t k = 0; k < 4; ++k) {
    for (const auto& [key, p] : orders[k]) {
      std::string joined;
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (i > 0) joined.push_back(' ');
        joined += vocab[key[i]];
      }
      maps[k].emplace(std::move(joined), NGramEntry{p.lp, k + 1 < 4 ? p.bow : 0.0});
    }
  }
  while (!maps.empty() && maps.back().empty()) maps.pop_back();
  return ArpaModel(std::move(maps));
}

}  // namespace kpcloud
