#pragma once

#include <cstddef>

#include "kpcloud/bagging.h"
#include "kpcloud/corpus.h"
#include "kpcloud/extract.h"
#include "kpcloud/features.h"
#include "kpcloud/ngram_lm.h"

namespace kpcloud {

ModelSchema model_schema(const FeatureSet& set);

struct TrainedPipeline {
  BaggedTreeModel model;
  IdfTable idf;
  std::size_t instances = 0;
  std::size_t positives = 0;
  std::size_t documents = 0;
  std::size_t gold_total = 0;
  std::size_t gold_covered = 0;

  double positive_rate() const { return instances ? static_cast<double>(positives) / instances : 0.0; }
};

// IDF from the train corpus, one instance per candidate, bagged trees.
TrainedPipeline train_pipeline(const Corpus& train, const LanguageResources& resources, const PhraseScorer* lm,
                               const FeatureSet& set, const BaggingParams& params,
                               const CandidateOptions& candidates = {});

}  // namespace kpcloud
