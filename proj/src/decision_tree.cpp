#include "kpcloud/decision_tree.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "kpcloud/errors.h"

namespace kpcloud {

namespace {

constexpr double kEps = 1e-12;

}  // namespace

std::string_view to_string(Algorithm a) { return a == Algorithm::C45 ? "c45" : "cart"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "c45" || name == "c4.5" || name == "C4.5") return Algorithm::C45;
  if (name == "cart" || name == "CART") return Algorithm::Cart;
  throw ValidationError("unknown tree algorithm '" + std::string(name) + "' (expected c45 or cart)");
}

double entropy(double pos, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (const double c : {pos, total - pos}) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

double gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

double pessimistic_extra_errors(double n, double e, double cf) {
  // Normal-deviate table interpolated at cf, as in Quinlan's release 8.
  static constexpr double conf[] = {0.0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00};
  static constexpr double dev[] = {4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00};
  if (n <= 0.0) return 0.0;
  std::size_t i = 1;
  while (i + 1 < std::size(conf) && cf > conf[i]) ++i;
  double coeff = dev[i - 1] + (dev[i] - dev[i - 1]) * (cf - conf[i - 1]) / (conf[i] - conf[i - 1]);
  coeff *= coeff;
  if (e < 1e-6) return n * (1.0 - std::exp(std::log(cf) / n));
  if (e < 0.9999) {
    const double v0 = n * (1.0 - std::exp(std::log(cf) / n));
    return v0 + e * (pessimistic_extra_errors(n, 1.0, cf) - v0);
  }
  if (e + 0.5 >= n) return 0.67 * (n - e);
  const double pr =
      (e + 0.5 + coeff / 2.0 + std::sqrt(coeff * ((e + 0.5) * (1.0 - (e + 0.5) / n) + coeff / 4.0))) / (n + coeff);
  return n * pr - e;
}

// ---- split search ----

namespace {

struct Candidate {
  TreeSplit split;
  bool valid = false;
};

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

Candidate best_numeric(const Dataset& data, std::span<const std::uint32_t> rows, std::size_t f,
                       const TreeParams& params, double n_pos) {
  const std::size_t n = rows.size();
  std::vector<std::pair<double, std::uint8_t>> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = {data.at(rows[i], f), data.labels[rows[i]]};
  std::stable_sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const double total = static_cast<double>(n);
  const bool c45 = params.algorithm == Algorithm::C45;
  const double parent = c45 ? entropy(n_pos, total) : gini(n_pos, total);
  Candidate best;
  double left_pos = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left_pos += col[i].second;
    if (!(col[i].first < col[i + 1].first)) continue;
    const std::size_t nl = i + 1;
    const std::size_t nr = n - nl;
    if (nl < params.min_leaf || nr < params.min_leaf) continue;
    const double l = static_cast<double>(nl);
    const double r = static_cast<double>(nr);
    const double right_pos = n_pos - left_pos;
    const double child = c45 ? (l / total) * entropy(left_pos, l) + (r / total) * entropy(right_pos, r)
                             : (l / total) * gini(left_pos, l) + (r / total) * gini(right_pos, r);
    const double gain = parent - child;
    if (!best.valid || gain > best.split.gain + kEps) {
      best.valid = true;
      best.split.valid = true;
      best.split.feature = f;
      best.split.kind = FeatureKind::Numeric;
      best.split.threshold = midpoint(col[i].first, col[i + 1].first);
      best.split.gain = gain;
      best.split.gain_ratio = c45 ? gain / entropy(l, total) : 0.0;
    }
  }
  return best;
}

std::size_t category_of(double v, std::uint32_t cardinality) {
  if (!(v >= 0.0) || v >= static_cast<double>(cardinality) || v != std::floor(v)) {
    throw ValidationError("categorical value " + std::to_string(v) + " outside 0.." +
                          std::to_string(cardinality - 1));
  }
  return static_cast<std::size_t>(v);
}

Candidate best_categorical(const Dataset& data, std::span<const std::uint32_t> rows, std::size_t f,
                           const TreeParams& params, double n_pos) {
  const auto card = data.schema[f].cardinality;
  std::vector<double> cnt(card, 0.0);
  std::vector<double> pos(card, 0.0);
  for (const auto r : rows) {
    const auto c = category_of(data.at(r, f), card);
    cnt[c] += 1.0;
    pos[c] += data.labels[r];
  }
  const double total = static_cast<double>(rows.size());
  const double min_leaf = static_cast<double>(params.min_leaf);
  Candidate best;

  if (params.algorithm == Algorithm::C45) {
    std::size_t big_branches = 0;
    double child = 0.0;
    double split_info = 0.0;
    for (std::uint32_t c = 0; c < card; ++c) {
      if (cnt[c] <= 0.0) continue;
      if (cnt[c] >= min_leaf) ++big_branches;
      child += (cnt[c] / total) * entropy(pos[c], cnt[c]);
      const double p = cnt[c] / total;
      split_info -= p * std::log2(p);
    }
    if (big_branches < 2) return best;
    best.valid = true;
    best.split.valid = true;
    best.split.feature = f;
    best.split.kind = FeatureKind::Categorical;
    best.split.gain = entropy(n_pos, total) - child;
    best.split.gain_ratio = split_info > 0.0 ? best.split.gain / split_info : 0.0;
    return best;
  }

  // CART: order present categories by positive rate; the optimal binary
  // partition is a prefix of that order.
  std::vector<std::uint32_t> present;
  for (std::uint32_t c = 0; c < card; ++c) {
    if (cnt[c] > 0.0) present.push_back(c);
  }
  std::stable_sort(present.begin(), present.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return pos[a] / cnt[a] < pos[b] / cnt[b]; });
  const double parent = gini(n_pos, total);
  double l = 0.0;
  double lp = 0.0;
  for (std::size_t k = 0; k + 1 < present.size(); ++k) {
    l += cnt[present[k]];
    lp += pos[present[k]];
    const double r = total - l;
    if (l < min_leaf || r < min_leaf) continue;
    const double gain = parent - (l / total) * gini(lp, l) - (r / total) * gini(n_pos - lp, r);
    if (!best.valid || gain > best.split.gain + kEps) {
      best.valid = true;
      best.split.valid = true;
      best.split.feature = f;
      best.split.kind = FeatureKind::Categorical;
      best.split.gain = gain;
      best.split.left_set.assign(card, 0);
      for (std::size_t j = 0; j <= k; ++j) best.split.left_set[present[j]] = 1;
    }
  }
  return best;
}

}  // namespace

TreeSplit find_best_split(const Dataset& data, std::span<const std::uint32_t> rows, const TreeParams& params) {
  double n_pos = 0.0;
  for (const auto r : rows) n_pos += data.labels[r];
  std::vector<TreeSplit> cands;
  for (std::size_t f = 0; f < data.cols(); ++f) {
    auto c = data.schema[f].kind == FeatureKind::Categorical ? best_categorical(data, rows, f, params, n_pos)
                                                              : best_numeric(data, rows, f, params, n_pos);
    if (c.valid && c.split.gain > -kEps) cands.push_back(std::move(c.split));
  }
  if (cands.empty()) return {};

  if (params.algorithm == Algorithm::Cart) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cands.size(); ++i) {
      if (cands[i].gain > cands[best].gain + kEps) best = i;
    }
    return cands[best];
  }

  double avg = 0.0;
  for (const auto& c : cands) avg += c.gain;
  avg /= static_cast<double>(cands.size());
  std::size_t best = cands.size();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].gain < avg - kEps) continue;
    if (best == cands.size() || cands[i].gain_ratio > cands[best].gain_ratio + kEps) best = i;
  }
  return cands[best];
}

// ---- training ----

namespace {

class Builder {
 public:
  Builder(const Dataset& data, const TreeParams& params, std::vector<DecisionTree::Node>& nodes)
      : data_(data), params_(params), nodes_(nodes) {}

  std::int32_t build(std::vector<std::uint32_t> rows, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    std::uint32_t pos = 0;
    for (const auto r : rows) pos += data_.labels[r];
    nodes_[id].positives = pos;
    nodes_[id].total = static_cast<std::uint32_t>(rows.size());

    const bool pure = pos == 0 || pos == rows.size();
    const bool too_small = rows.size() < 2 * std::max<std::size_t>(1, params_.min_leaf);
    const bool too_deep = params_.max_depth > 0 && depth >= params_.max_depth;
    if (pure || too_small || too_deep) return id;
    const auto split = find_best_split(data_, rows, params_);
    if (!split.valid) return id;

    std::vector<std::vector<std::uint32_t>> parts;
    if (split.kind == FeatureKind::Categorical && params_.algorithm == Algorithm::C45) {
      parts.resize(data_.schema[split.feature].cardinality);
      for (const auto r : rows) parts[static_cast<std::size_t>(data_.at(r, split.feature))].push_back(r);
    } else {
      parts.resize(2);
      for (const auto r : rows) {
        const double v = data_.at(r, split.feature);
        bool left;
        if (split.kind == FeatureKind::Numeric) {
          left = v <= split.threshold;
        } else {
          left = split.left_set[static_cast<std::size_t>(v)] != 0;
        }
        parts[left ? 0 : 1].push_back(r);
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes_[id].feature = static_cast<std::int32_t>(split.feature);
    nodes_[id].kind = split.kind;
    nodes_[id].threshold = split.kind == FeatureKind::Numeric ? split.threshold : 0.0;
    nodes_[id].left_set = split.left_set;
    std::vector<std::int32_t> children;
    children.reserve(parts.size());
    for (auto& part : parts) children.push_back(build(std::move(part), depth + 1));
    nodes_[id].children = std::move(children);
    return id;
  }

 private:
  const Dataset& data_;
  const TreeParams& params_;
  std::vector<DecisionTree::Node>& nodes_;
};

double leaf_errors(const DecisionTree::Node& n) {
  return static_cast<double>(std::min(n.positives, n.total - n.positives));
}

double prune_pessimistic(std::vector<DecisionTree::Node>& nodes, std::int32_t id, double cf) {
  auto& node = nodes[id];
  const double e = leaf_errors(node);
  const double as_leaf = e + pessimistic_extra_errors(node.total, e, cf);
  if (node.is_leaf()) return as_leaf;
  double subtree = 0.0;
  for (const auto c : std::vector<std::int32_t>(node.children)) subtree += prune_pessimistic(nodes, c, cf);
  auto& again = nodes[id];
  if (as_leaf <= subtree + 0.1) {
    again.feature = -1;
    again.children.clear();
    again.left_set.clear();
    again.threshold = 0.0;
    return as_leaf;
  }
  return subtree;
}

struct SubtreeStats {
  double errors = 0.0;
  std::size_t leaves = 0;
};

SubtreeStats subtree_stats(const std::vector<DecisionTree::Node>& nodes, std::int32_t id) {
  const auto& n = nodes[id];
  if (n.is_leaf()) return {leaf_errors(n), 1};
  SubtreeStats s;
  for (const auto c : n.children) {
    const auto cs = subtree_stats(nodes, c);
    s.errors += cs.errors;
    s.leaves += cs.leaves;
  }
  return s;
}

void prune_cost_complexity(std::vector<DecisionTree::Node>& nodes, double alpha) {
  const double n_root = std::max<double>(1.0, nodes[0].total);
  for (;;) {
    std::int32_t weakest = -1;
    double best_g = std::numeric_limits<double>::infinity();
    std::vector<std::int32_t> stack = {0};
    while (!stack.empty()) {
      const auto id = stack.back();
      stack.pop_back();
      const auto& n = nodes[id];
      if (n.is_leaf()) continue;
      const auto s = subtree_stats(nodes, id);
      const double g = (leaf_errors(n) - s.errors) / n_root / static_cast<double>(s.leaves - 1);
      if (g < best_g - kEps || (std::abs(g - best_g) <= kEps && id < weakest)) {
        best_g = g;
        weakest = id;
      }
      for (const auto c : n.children) stack.push_back(c);
    }
    if (weakest < 0 || best_g > alpha) return;
    nodes[weakest].feature = -1;
    nodes[weakest].children.clear();
    nodes[weakest].left_set.clear();
    nodes[weakest].threshold = 0.0;
  }
}

std::vector<DecisionTree::Node> compact(const std::vector<DecisionTree::Node>& nodes) {
  std::vector<DecisionTree::Node> out;
  out.reserve(nodes.size());
  std::function<std::int32_t(std::int32_t)> copy = [&](std::int32_t id) -> std::int32_t {
    const auto nid = static_cast<std::int32_t>(out.size());
    out.push_back(nodes[id]);
    std::vector<std::int32_t> kids;
    for (const auto c : nodes[id].children) kids.push_back(copy(c));
    out[nid].children = std::move(kids);
    return nid;
  };
  copy(0);
  return out;
}

}  // namespace

DecisionTree DecisionTree::train(const Dataset& data, std::span<const std::uint32_t> rows, const TreeParams& params) {
  if (rows.empty()) throw ValidationError("cannot train a decision tree on empty data");
  for (std::size_t f = 0; f < data.cols(); ++f) {
    if (data.schema[f].kind == FeatureKind::Categorical && data.schema[f].cardinality == 0)
      throw SchemaError("categorical feature '" + data.schema[f].name + "' has cardinality 0");
  }
  DecisionTree tree;
  tree.algorithm_ = params.algorithm;
  Builder(data, params, tree.nodes_).build(std::vector<std::uint32_t>(rows.begin(), rows.end()), 0);
  if (params.algorithm == Algorithm::C45 && params.prune) {
    prune_pessimistic(tree.nodes_, 0, params.confidence);
  } else if (params.algorithm == Algorithm::Cart && params.cart_alpha > 0.0) {
    prune_cost_complexity(tree.nodes_, params.cart_alpha);
  }
  tree.nodes_ = compact(tree.nodes_);
  return tree;
}

DecisionTree DecisionTree::train(const Dataset& data, const TreeParams& params) {
  std::vector<std::uint32_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return train(data, rows, params);
}

const DecisionTree::Node& DecisionTree::leaf_for(std::span<const double> row) const {
  if (nodes_.empty()) throw ValidationError("empty decision tree");
  const Node* node = &nodes_[0];
  for (;;) {
    if (node->is_leaf()) return *node;
    const double v = row[static_cast<std::size_t>(node->feature)];
    std::size_t child;
    if (node->kind == FeatureKind::Numeric) {
      child = v <= node->threshold ? 0 : 1;
    } else if (!node->left_set.empty()) {
      const bool in_range = v >= 0.0 && v < static_cast<double>(node->left_set.size());
      child = in_range && node->left_set[static_cast<std::size_t>(v)] ? 0 : 1;
    } else {
      if (!(v >= 0.0 && v < static_cast<double>(node->children.size()))) return *node;
      child = static_cast<std::size_t>(v);
    }
    const Node* next = &nodes_[static_cast<std::size_t>(node->children[child])];
    // Branches no training instance reached fall back to the parent.
    if (next->total == 0) return *node;
    node = next;
  }
}

double DecisionTree::predict(std::span<const double> row) const { return leaf_for(row).probability(); }

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    for (const auto c : nodes_[i].children) d[static_cast<std::size_t>(c)] = d[i] + 1;
  }
  return best;
}

void DecisionTree::write(BinaryWriter& w) const {
  w.put<std::uint8_t>(static_cast<std::uint8_t>(algorithm_));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(nodes_.size()));
  for (const auto& n : nodes_) {
    w.put<std::int32_t>(n.feature);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(n.kind));
    w.put<double>(n.threshold);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(n.left_set.size()));
    for (const auto b : n.left_set) w.put<std::uint8_t>(b);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(n.children.size()));
    for (const auto c : n.children) w.put<std::int32_t>(c);
    w.put<std::uint32_t>(n.positives);
    w.put<std::uint32_t>(n.total);
  }
}

DecisionTree DecisionTree::read(BinaryReader& r, std::size_t n_features) {
  DecisionTree t;
  const auto alg = r.get<std::uint8_t>();
  if (alg > 1) throw FormatError("unknown tree algorithm tag " + std::to_string(alg));
  t.algorithm_ = static_cast<Algorithm>(alg);
  const auto count = r.get<std::uint32_t>();
  if (count == 0 || count > r.remaining()) throw FormatError("bad tree node count");
  t.nodes_.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& n = t.nodes_[i];
    n.feature = r.get<std::int32_t>();
    const auto kind = r.get<std::uint8_t>();
    if (kind > 1) throw FormatError("bad feature kind in tree node");
    n.kind = static_cast<FeatureKind>(kind);
    n.threshold = r.get<double>();
    const auto ls = r.get<std::uint32_t>();
    if (ls > r.remaining()) throw FormatError("truncated tree node");
    n.left_set.resize(ls);
    for (auto& b : n.left_set) b = r.get<std::uint8_t>();
    const auto nc = r.get<std::uint32_t>();
    if (nc > r.remaining()) throw FormatError("truncated tree node");
    n.children.resize(nc);
    for (auto& c : n.children) {
      c = r.get<std::int32_t>();
      if (c <= static_cast<std::int32_t>(i) || c >= static_cast<std::int32_t>(count))
        throw FormatError("tree child index out of range");
    }
    n.positives = r.get<std::uint32_t>();
    n.total = r.get<std::uint32_t>();
    if (n.positives > n.total) throw FormatError("tree node has more positives than instances");
    if (n.feature >= 0) {
      if (static_cast<std::size_t>(n.feature) >= n_features) throw FormatError("tree feature index out of range");
      if (n.children.size() < 2) throw FormatError("internal tree node with fewer than two children");
    } else if (!n.children.empty()) {
      throw FormatError("leaf with children");
    }
  }
  return t;
}

bool operator==(const DecisionTree::Node& a, const DecisionTree::Node& b) {
  return a.feature == b.feature && a.kind == b.kind && a.threshold == b.threshold && a.left_set == b.left_set &&
         a.children == b.children && a.positives == b.positives && a.total == b.total;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  return a.algorithm_ == b.algorithm_ && a.nodes_ == b.nodes_;
}

}  // namespace kpcloud
