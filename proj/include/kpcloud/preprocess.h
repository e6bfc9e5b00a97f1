#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kpcloud {

struct Token {
  std::string surface;  // original casing, punctuation stripped
  std::string lower;    // case-folded surface
  std::string stem;     // empty until annotated with LanguageResources
  std::size_t char_offset = 0;  // byte offset of surface in the source text
  bool is_stopword = false;
  bool sentence_boundary_after = false;
};

enum class PosTag { Noun, Verb, Adjective, Adverb, Other };

enum class Language { Portuguese, English };

std::string_view to_string(Language lang);
Language parse_language(std::string_view name);

class Stemmer {
 public:
  virtual ~Stemmer() = default;
  virtual std::string_view name() const = 0;
  // One pass of the rule cascade over an already case-folded word.
  virtual std::string apply_rules(std::string_view folded) const = 0;
};

// RSLP-style suffix-stripping cascade; rules in docs/stemmer_rules.md.
std::shared_ptr<const Stemmer> make_portuguese_stemmer();
// Porter (1980) algorithm for ASCII words; other words pass through.
std::shared_ptr<const Stemmer> make_porter_stemmer();

struct LanguageResources {
  Language language = Language::Portuguese;
  std::unordered_set<std::string> stopwords;
  std::shared_ptr<const Stemmer> stemmer;
  std::unordered_set<std::string> ne_lexicon;
  std::unordered_map<std::string, PosTag> pos_lexicon;

  // Stopwords and lexicons shipped under data/<lang>/, compiled into the
  // library. Throws ValidationError if the stopword set would be empty.
  static LanguageResources builtin(Language lang);
  // Starts from builtin(lang) and replaces every list whose path is non-empty.
  static LanguageResources load(Language lang, const std::string& stopwords_path,
                                const std::string& ne_lexicon_path = {},
                                const std::string& pos_lexicon_path = {});
};

// Splits on whitespace, strips leading/trailing punctuation into sentence
// boundary flags. Leaves stem/is_stopword unset.
std::vector<Token> tokenize(std::string_view text);
// Tokenizes and fills stem/is_stopword.
std::vector<Token> tokenize(std::string_view text, const LanguageResources& resources);
void annotate(std::vector<Token>& tokens, const LanguageResources& resources);

// Case-folds and runs the stemmer cascade to a fixed point, so the result is
// idempotent. Words without letters are returned case-folded.
std::string stem(std::string_view word, const LanguageResources& resources);
bool is_stopword(std::string_view word, const LanguageResources& resources);

// Space-joined stems of the tokenized phrase ("" if it has no tokens).
std::string normalize_phrase(std::string_view phrase, const LanguageResources& resources);

PosTag parse_pos_tag(std::string_view tag);

// `#` comments and blank lines ignored; entries case-folded.
std::unordered_set<std::string> parse_word_list(std::string_view content);
std::unordered_set<std::string> load_word_list(const std::string& path);
// word<TAB>tag; keys case-folded.
std::unordered_map<std::string, std::string> parse_tag_lexicon(std::string_view content,
                                                              const std::string& source = "<memory>");
std::unordered_map<std::string, std::string> load_tag_lexicon(const std::string& path);

}  // namespace kpcloud
