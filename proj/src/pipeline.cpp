#include "kpcloud/pipeline.h"

namespace kpcloud {

ModelSchema model_schema(const FeatureSet& set) {
  return {kFeatureSchemaVersion, set.mask(), feature_schema(set)};
}

TrainedPipeline train_pipeline(const Corpus& train, const LanguageResources& resources, const PhraseScorer* lm,
                               const FeatureSet& set, const BaggingParams& params,
                               const CandidateOptions& candidates) {
  TrainedPipeline out;
  out.idf = build_idf(train, candidates);
  const FeatureContext ctx{resources, out.idf, lm, set, candidates};
  const auto ts = build_training_set(train, ctx, params.threads);
  out.instances = ts.data.rows();
  out.positives = ts.data.positives();
  out.documents = ts.documents;
  out.gold_total = ts.gold_total;
  out.gold_covered = ts.gold_covered;
  out.model = train_bagging(ts.data, params, model_schema(set));
  return out;
}

}  // namespace kpcloud
