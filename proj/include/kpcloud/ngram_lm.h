#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kpcloud {

inline constexpr double kLogProbFloor = -99.0;
inline constexpr std::size_t kMaxPhraseScoreHistory = 3;

// Source of the f5 feature: length-normalized log10 probability of a phrase.
class PhraseScorer {
 public:
  virtual ~PhraseScorer() = default;
  // log10 P(word | history); history is oldest-first and may be longer than
  // the model order (extra words are ignored).
  virtual double log_prob(std::string_view word, std::span<const std::string> history) const = 0;
  virtual int max_order() const = 0;

  // (sum of per-word conditional log10 probs, history truncated to 3) / words.
  double phrase_score(std::span<const std::string> words) const;
};

struct NGramEntry {
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
};

// Back-off n-gram model in ARPA form, queried with the Katz recursion.
class ArpaModel final : public PhraseScorer {
 public:
  static constexpr int kMaxOrder = 4;
  using OrderMap = std::unordered_map<std::string, NGramEntry>;  // key: words joined by ' '

  ArpaModel() = default;
  explicit ArpaModel(std::vector<OrderMap> orders);

  static ArpaModel load(const std::string& path);
  static ArpaModel parse(std::istream& in, const std::string& source = "<stream>");

  int max_order() const override { return static_cast<int>(orders_.size()); }
  std::size_t count(int order) const { return orders_.at(static_cast<std::size_t>(order - 1)).size(); }
  const OrderMap& ngrams(int order) const { return orders_.at(static_cast<std::size_t>(order - 1)); }
  const NGramEntry* find(std::span<const std::string> words) const;
  bool in_vocab(std::string_view word) const;
  bool has_unk() const { return !unk_.empty(); }
  const std::string& unk_token() const { return unk_; }
  std::vector<std::string> vocabulary() const;

  // Katz back-off: the longest stored (history, word) n-gram, plus the back-off
  // weights of every longer history that is stored. OOV words map to <unk>
  // when the model has one; otherwise an OOV word scores kLogProbFloor.
  double log_prob(std::string_view word, std::span<const std::string> history) const override;

  // ARPA text; entries sorted within each order for reproducible output.
  void write(std::ostream& out) const;
  std::string to_arpa_text() const;

 private:
  std::string map_word(std::string_view word) const;

  std::vector<OrderMap> orders_;
  std::string unk_;
};

std::string join_words(std::span<const std::string> words);

}  // namespace kpcloud
