#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpcloud/binary_io.h"
#include "kpcloud/dataset.h"

namespace kpcloud {

enum class Algorithm : std::uint8_t { C45 = 0, Cart = 1 };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct TreeParams {
  Algorithm algorithm = Algorithm::Cart;
  std::size_t min_leaf = 2;   // minimum instances on each side of a split
  std::size_t max_depth = 0;  // 0 = unlimited
  bool prune = true;          // C4.5 pessimistic-error pruning
  double confidence = 0.25;   // C4.5 pruning CF
  double cart_alpha = 0.0;    // CART cost-complexity; 0 disables pruning
};

double entropy(double pos, double total);
double gini(double pos, double total);
// C4.5 pessimistic extra errors for a leaf with n instances and e errors.
double pessimistic_extra_errors(double n, double e, double cf);

struct TreeSplit {
  bool valid = false;
  std::size_t feature = 0;
  FeatureKind kind = FeatureKind::Numeric;
  double threshold = 0.0;              // numeric: x <= threshold goes left
  std::vector<std::uint8_t> left_set;  // CART categorical: 1 = category goes left
  double gain = 0.0;                   // information gain (C4.5) or Gini decrease (CART)
  double gain_ratio = 0.0;             // C4.5 only
};

// Best split of `rows` under params.algorithm.
//  C4.5: per numeric feature the midpoint threshold of maximal gain; per
//  categorical feature a multiway split; among features whose gain is at least
//  the average, the largest gain ratio wins.
//  CART: the binary split (midpoint or category subset) of maximal Gini decrease.
// Ties keep the earlier feature / lower threshold. Both sides must hold at
// least min_leaf rows.
TreeSplit find_best_split(const Dataset& data, std::span<const std::uint32_t> rows, const TreeParams& params);

class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 for leaves
    FeatureKind kind = FeatureKind::Numeric;
    double threshold = 0.0;
    std::vector<std::uint8_t> left_set;
    std::vector<std::int32_t> children;  // numeric/CART: {left, right}; C4.5 categorical: one per value
    std::uint32_t positives = 0;
    std::uint32_t total = 0;

    bool is_leaf() const { return feature < 0; }
    double probability() const { return (positives + 1.0) / (total + 2.0); }
  };

  DecisionTree() = default;

  // Throws ValidationError on empty input.
  static DecisionTree train(const Dataset& data, std::span<const std::uint32_t> rows, const TreeParams& params);
  static DecisionTree train(const Dataset& data, const TreeParams& params);

  // Laplace probability of the leaf reached by `row`.
  double predict(std::span<const double> row) const;
  const Node& leaf_for(std::span<const double> row) const;

  Algorithm algorithm() const { return algorithm_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  void write(BinaryWriter& w) const;
  static DecisionTree read(BinaryReader& r, std::size_t n_features);

  friend bool operator==(const DecisionTree&, const DecisionTree&);

 private:
  Algorithm algorithm_ = Algorithm::Cart;
  std::vector<Node> nodes_;  // nodes_[0] is the root
};

bool operator==(const DecisionTree::Node& a, const DecisionTree::Node& b);

}  // namespace kpcloud
