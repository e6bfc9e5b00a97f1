#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kpcloud/preprocess.h"

namespace kpcloud {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// RFC 3339 date-time ("2011-05-03T14:00:00Z", "...T15:00:00.250+01:00").
Timestamp parse_rfc3339(std::string_view text);
// UTC with a `Z` suffix; milliseconds printed only when non-zero.
std::string format_rfc3339(Timestamp t);

struct NewsDocument {
  std::string id;
  std::string channel;
  std::string program;
  Timestamp broadcast_time{};
  std::size_t position_in_program = 0;  // order of the story within its program
  std::optional<std::string> topic;
  std::string text;
  std::vector<Token> tokens;  // derived from text
  std::optional<std::vector<std::string>> gold_keyphrases;

  std::size_t word_count() const { return tokens.size(); }
};

enum class Split { Train, Test, Unlabeled };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

inline constexpr std::size_t kMaxKeyphraseWords = 5;

struct Corpus {
  std::vector<NewsDocument> documents;
  Split split = Split::Unlabeled;

  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
};

// Checks id uniqueness, gold presence for train/test and the 1..5 word limit.
void validate_corpus(const Corpus& corpus);

// Parses `{"documents": [...]}`. A bare document object is also accepted as a
// one-document corpus. `source` names the input in error messages.
Corpus parse_corpus(std::string_view json_text, Split split, const LanguageResources& resources,
                    const std::string& source = "<memory>");
Corpus load_corpus(const std::string& path, Split split, const LanguageResources& resources);

std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t total_words = 0;
  double mean_gold_keyphrases = 0.0;
};

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace kpcloud
