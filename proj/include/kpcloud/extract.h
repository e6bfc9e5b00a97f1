#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kpcloud/bagging.h"
#include "kpcloud/corpus.h"
#include "kpcloud/features.h"

namespace kpcloud {

struct RankedKeyphrase {
  std::string surface;
  std::string normalized;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  std::size_t tf = 0;
  double tfidf = 0.0;
  double first_pos = 0.0;
};

// Score desc, tfidf desc, first_pos asc, normalized asc.
bool ranks_before(const RankedKeyphrase& a, const RankedKeyphrase& b);
// Sorts by ranks_before and assigns consecutive ranks.
void assign_ranks(std::vector<RankedKeyphrase>& phrases);

// Everything needed to score a document's candidates with a trained model.
struct Extractor {
  const BaggedTreeModel& model;
  FeatureContext features;

  // Throws SchemaError if the model was trained on a different feature layout.
  void check_schema() const;
};

std::vector<RankedKeyphrase> rank_candidates(const NewsDocument& doc, const Extractor& extractor);

// First min(n, |ranked|) entries; n = 0 is a ValidationError.
std::vector<RankedKeyphrase> extract_top_n(std::span<const RankedKeyphrase> ranked, std::size_t n);

// Distinct stemmed-normalized gold forms (empty phrases dropped).
std::vector<std::string> normalize_gold(std::span<const std::string> gold, const LanguageResources& resources);

// One-to-one matches between extracted normalized forms and gold forms
// (gold given as surface strings and normalized here).
std::size_t match_keyphrases(std::span<const RankedKeyphrase> extracted, std::span<const std::string> gold,
                             const LanguageResources& resources);

struct TrainingSet {
  Dataset data;
  std::vector<std::string> doc_ids;  // per row
  std::size_t documents = 0;
  std::size_t gold_total = 0;     // distinct normalized gold forms over all documents
  std::size_t gold_covered = 0;   // of those, present among the candidates
};

// One row per candidate; label = normalized form equals a normalized gold form.
TrainingSet build_training_set(const Corpus& corpus, const FeatureContext& ctx, std::size_t threads = 1);

}  // namespace kpcloud
