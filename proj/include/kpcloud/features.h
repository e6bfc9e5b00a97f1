#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kpcloud/candidates.h"
#include "kpcloud/corpus.h"
#include "kpcloud/dataset.h"
#include "kpcloud/ngram_lm.h"
#include "kpcloud/preprocess.h"

namespace kpcloud {

inline constexpr std::uint32_t kFeatureSchemaVersion = 1;

enum class PosPattern : std::uint8_t { NounOnly = 0, NounPhrase = 1, ContainsVerb = 2, Other = 3 };
inline constexpr std::uint32_t kPosPatternCount = 4;

std::string_view to_string(PosPattern p);

struct FeatureVector {
  std::size_t tf = 0;
  double idf = 0.0;
  double tfidf = 0.0;
  double first_pos = 0.0;
  double last_pos = 0.0;
  double spread = 0.0;
  std::size_t n_words = 0;
  std::size_t f1_chars = 0;
  std::size_t f2_named_entities = 0;
  std::size_t f3_capitals = 0;
  double f4_pos_noun_frac = 0.0;
  PosPattern f4_pos_pattern = PosPattern::Other;
  double f5_lm_logprob = 0.0;
};

// Which extended features feed the classifier; the 7 base features always do.
struct FeatureSet {
  bool f1 = true;
  bool f2 = true;
  bool f3 = true;
  bool f4 = true;
  bool f5 = true;

  static FeatureSet base() { return {false, false, false, false, false}; }
  static FeatureSet all() { return {}; }
  // "base", "all", or "base+f1+f4" style lists.
  static FeatureSet parse(std::string_view spec);
  std::string label() const;  // inverse of parse
  std::uint32_t mask() const;
  static FeatureSet from_mask(std::uint32_t mask);
  bool needs_lm() const { return f5; }

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;
};

std::vector<FeatureSpec> feature_schema(const FeatureSet& set);
std::vector<double> to_row(const FeatureVector& fv, const FeatureSet& set);

class IdfTable {
 public:
  IdfTable() = default;

  std::size_t doc_count() const { return doc_count_; }
  // 0 for unseen phrases.
  std::size_t doc_freq(const std::string& normalized) const;
  // log10(doc_count / doc_freq); unseen phrases use doc_freq = 1.
  double idf(const std::string& normalized) const;
  std::size_t size() const { return doc_freq_.size(); }
  const std::unordered_map<std::string, std::size_t>& entries() const { return doc_freq_; }

  // Counts each distinct normalized form of one document once.
  void add_document(std::span<const CandidatePhrase> candidates);

  // Text form: header line "kpcloud-idf <version> <doc_count>", then
  // "<doc_freq>\t<normalized>" lines sorted by phrase.
  std::string serialize() const;
  static IdfTable parse(std::string_view text, const std::string& source = "<memory>");
  void save(const std::string& path) const;
  static IdfTable load(const std::string& path);

 private:
  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> doc_freq_;
};

// Throws ValidationError on an empty corpus.
IdfTable build_idf(const Corpus& corpus, const CandidateOptions& options = {});

// tf, idf, tfidf, positions (occurrence start / word_count), n_words.
FeatureVector base_features(const CandidatePhrase& cand, const NewsDocument& doc, const IdfTable& idf);

// A word is a name when it is in the NE lexicon, or it is capitalized, not
// sentence-initial and not a stopword. Counts words of tokens[begin, end);
// sentence-initial is judged against the full token sequence.
std::size_t tag_named_entities(std::span<const Token> tokens, Occurrence span, const LanguageResources& resources);
// Treats `words` as the whole sequence (its first word is sentence-initial).
std::size_t tag_named_entities(std::span<const Token> words, const LanguageResources& resources);

// Lexicon lookup on the folded form, then the suffix table, then capitalized
// words default to Noun and everything else to Other.
PosTag tag_word(const Token& word, const LanguageResources& resources);

struct PosSummary {
  double noun_frac = 0.0;
  PosPattern pattern = PosPattern::Other;
};

PosSummary tag_pos(std::span<const Token> words, const LanguageResources& resources);
PosPattern pos_pattern(std::span<const PosTag> tags);

// Fills f1..f5 from the candidate's first occurrence. `lm` may be null, in
// which case f5 is left at 0.
void extended_features(FeatureVector& fv, const CandidatePhrase& cand, const NewsDocument& doc,
                       const LanguageResources& resources, const PhraseScorer* lm);

struct AnalyzedCandidate {
  CandidatePhrase candidate;
  FeatureVector features;
};

struct FeatureContext {
  const LanguageResources& resources;
  const IdfTable& idf;
  const PhraseScorer* lm = nullptr;
  FeatureSet set = FeatureSet::all();
  CandidateOptions candidates = {};
};

// Candidates plus full feature vectors. Throws SchemaError if the feature set
// needs f5 and no language model is supplied.
std::vector<AnalyzedCandidate> analyze_document(const NewsDocument& doc, const FeatureContext& ctx);

}  // namespace kpcloud
