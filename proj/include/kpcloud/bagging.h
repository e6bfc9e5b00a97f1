#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kpcloud/decision_tree.h"

namespace kpcloud {

struct BaggingParams {
  TreeParams tree;
  std::size_t n_bags = 10;
  std::uint64_t seed = 42;
  // > 0: each bag keeps at most ratio x (bag positives) negatives.
  double negative_ratio = 0.0;
  std::size_t threads = 1;
  // Test hook: each bag is the data itself instead of a bootstrap sample.
  bool bootstrap = true;
};

// Identifies the feature extractor a model was trained against.
struct ModelSchema {
  std::uint32_t version = 0;
  std::uint32_t feature_mask = 0;
  std::vector<FeatureSpec> features;
};

// Deterministic per-bag generator: mt19937_64 seeded from (seed, bag index).
std::mt19937_64 bag_rng(std::uint64_t seed, std::uint64_t bag_index);
// Unbiased draw from [0, n) (Lemire's multiply-and-reject).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);
// Row indices of bag `bag_index`, sorted.
std::vector<std::uint32_t> bootstrap_sample(std::size_t n_rows, std::uint64_t seed, std::uint64_t bag_index);

class BaggedTreeModel {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  BaggedTreeModel() = default;

  // Arithmetic mean of the trees' Laplace leaf probabilities. Throws
  // SchemaError if the row width differs from the schema.
  double predict_proba(std::span<const double> row) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  Algorithm algorithm() const { return params_.tree.algorithm; }
  std::size_t n_bags() const { return trees_.size(); }
  std::uint64_t seed() const { return params_.seed; }
  const BaggingParams& params() const { return params_; }
  const ModelSchema& schema() const { return schema_; }
  std::uint64_t schema_hash() const;

  std::vector<char> serialize() const;
  // Throws FormatError on bad magic, truncation or checksum mismatch, and
  // VersionError when the container or feature schema version differs.
  static BaggedTreeModel deserialize(std::span<const char> bytes,
                                     std::uint32_t expected_schema_version);
  void save(const std::string& path) const;
  static BaggedTreeModel load(const std::string& path, std::uint32_t expected_schema_version);

  friend BaggedTreeModel train_bagging(const Dataset& data, const BaggingParams& params, ModelSchema schema);
  // Wraps pre-built trees (all must share `params.tree.algorithm`).
  static BaggedTreeModel from_trees(std::vector<DecisionTree> trees, const BaggingParams& params, ModelSchema schema);

 private:
  std::vector<DecisionTree> trees_;
  BaggingParams params_;
  ModelSchema schema_;
};

// When schema.features is empty it is taken from data.schema; otherwise the two
// must agree.
BaggedTreeModel train_bagging(const Dataset& data, const BaggingParams& params, ModelSchema schema = {});

// Area under the ROC curve with ties counted half; 0.5 if a class is missing.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace kpcloud
