#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kpcloud/corpus.h"
#include "kpcloud/ngram_lm.h"
#include "kpcloud/preprocess.h"

namespace kpcloud {

// Planted-keyphrase corpus: every document gets gold_per_doc capitalized
// pseudo-words that occur min_tf..max_tf times, once within the first
// early_fraction of the text, and nowhere else in the corpus. The rest is
// corpus-wide filler, stopwords and recurring capitalized distractor names.
struct SyntheticCorpusOptions {
  std::size_t train_docs = 100;
  std::size_t test_docs = 10;
  std::size_t words_per_doc = 300;
  std::size_t word_jitter = 20;  // document length = words_per_doc +- jitter
  std::size_t gold_per_doc = 10;
  std::size_t min_tf = 3;
  std::size_t max_tf = 6;
  double early_fraction = 0.25;
  std::size_t filler_vocabulary = 400;
  std::size_t distractor_names = 15;
  double stopword_rate = 0.3;
  double distractor_rate = 0.03;
  std::uint64_t seed = 7;
  std::string start_time = "2011-05-03T06:00:00Z";
};

struct SyntheticCorpus {
  Corpus train;
  Corpus test;
  std::size_t train_words = 0;
  std::size_t test_words = 0;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusOptions& options, const LanguageResources& resources);

// Random back-off model. Every stored k-gram (k > 1) extends a stored
// (k-1)-gram history; each history leaves backoff_mass in [min, max] for unseen
// continuations and its back-off weight is set so the conditional distribution
// sums to one.
struct SyntheticLmOptions {
  std::size_t vocabulary = 5000;            // unigrams, including <unk> when requested
  std::array<std::size_t, 3> higher = {40000, 35000, 20000};  // bigram, trigram, 4-gram targets
  bool with_unk = true;
  double min_backoff_mass = 0.1;
  double max_backoff_mass = 0.5;
  std::uint64_t seed = 11;
};

ArpaModel make_synthetic_lm(const SyntheticLmOptions& options);

// Deterministic pronounceable pseudo-word from an index (distinct per index).
std::string pseudo_word(std::uint64_t index, std::uint64_t salt);

}  // namespace kpcloud
