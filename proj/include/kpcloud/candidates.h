#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kpcloud/corpus.h"
#include "kpcloud/preprocess.h"

namespace kpcloud {

// Half-open token range [begin, end).
struct Occurrence {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

struct CandidatePhrase {
  std::string surface;     // surface words of the first occurrence
  std::string normalized;  // space-joined stems
  std::size_t n_words = 0;
  std::vector<Occurrence> occurrences;  // document order

  std::size_t tf() const { return occurrences.size(); }
};

struct CandidateOptions {
  std::size_t max_words = kMaxKeyphraseWords;
};

// All contiguous 1..max_words spans that stay inside one sentence and neither
// start nor end with a stopword, merged by normalized form. Tokens must be
// annotated. Output is ordered by first occurrence, then by length.
std::vector<CandidatePhrase> generate_candidates(std::span<const Token> tokens,
                                                 const CandidateOptions& options = {});
std::vector<CandidatePhrase> generate_candidates(const NewsDocument& doc, const CandidateOptions& options = {});

// One entry per normalized form with occurrences concatenated in document
// order; the surface is taken from the earliest occurrence.
std::vector<CandidatePhrase> merge_occurrences(std::vector<CandidatePhrase> candidates);

}  // namespace kpcloud
