#include "kpcloud/bagging.h"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "kpcloud/binary_io.h"
#include "kpcloud/errors.h"
#include "kpcloud/hash.h"
#include "kpcloud/parallel.h"

namespace kpcloud {

namespace {

constexpr char kMagic[8] = {'K', 'P', 'B', 'A', 'G', 'T', 'R', 'E'};

}  // namespace

std::mt19937_64 bag_rng(std::uint64_t seed, std::uint64_t bag_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(bag_index + 1)));
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) return 0;
  using u128 = unsigned __int128;
  std::uint64_t x = rng();
  u128 m = static_cast<u128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = rng();
      m = static_cast<u128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::uint32_t> bootstrap_sample(std::size_t n_rows, std::uint64_t seed, std::uint64_t bag_index) {
  auto rng = bag_rng(seed, bag_index);
  std::vector<std::uint32_t> rows(n_rows);
  for (auto& r : rows) r = static_cast<std::uint32_t>(uniform_below(rng, n_rows));
  std::sort(rows.begin(), rows.end());
  return rows;
}

namespace {

std::vector<std::uint32_t> bag_rows(const Dataset& data, const BaggingParams& params, std::uint64_t bag) {
  std::vector<std::uint32_t> rows;
  if (params.bootstrap) {
    rows = bootstrap_sample(data.rows(), params.seed, bag);
  } else {
    rows.resize(data.rows());
    std::iota(rows.begin(), rows.end(), 0);
  }
  if (params.negative_ratio > 0.0) {
    std::vector<std::uint32_t> pos;
    std::vector<std::uint32_t> neg;
    for (const auto r : rows) (data.labels[r] ? pos : neg).push_back(r);
    const auto keep = static_cast<std::size_t>(params.negative_ratio * static_cast<double>(pos.size()));
    if (neg.size() > keep) {
      // Separate stream so the bootstrap draw itself is unchanged.
      auto rng = bag_rng(~params.seed, bag);
      for (std::size_t i = 0; i < keep; ++i) {
        const auto j = i + uniform_below(rng, neg.size() - i);
        std::swap(neg[i], neg[j]);
      }
      neg.resize(keep);
      rows = std::move(pos);
      rows.insert(rows.end(), neg.begin(), neg.end());
      std::sort(rows.begin(), rows.end());
    }
  }
  return rows;
}

}  // namespace

BaggedTreeModel train_bagging(const Dataset& data, const BaggingParams& params, ModelSchema schema) {
  if (params.n_bags < 1) throw ValidationError("n_bags must be >= 1");
  if (data.rows() == 0) throw ValidationError("cannot train on empty data");
  if (schema.features.empty()) {
    schema.features = data.schema;
  } else if (schema.features != data.schema) {
    throw SchemaError("dataset schema does not match the declared model schema");
  }
  std::vector<DecisionTree> trees(params.n_bags);
  parallel_for(params.n_bags, params.threads, [&](std::size_t b) {
    auto rows = bag_rows(data, params, b);
    if (rows.empty()) rows = bootstrap_sample(data.rows(), params.seed, b);
    trees[b] = DecisionTree::train(data, rows, params.tree);
  });
  return BaggedTreeModel::from_trees(std::move(trees), params, std::move(schema));
}

BaggedTreeModel BaggedTreeModel::from_trees(std::vector<DecisionTree> trees, const BaggingParams& params,
                                            ModelSchema schema) {
  if (trees.empty()) throw ValidationError("model needs at least one tree");
  for (const auto& t : trees) {
    if (t.algorithm() != params.tree.algorithm) throw ValidationError("trees disagree on the algorithm tag");
  }
  BaggedTreeModel m;
  m.trees_ = std::move(trees);
  m.params_ = params;
  m.params_.n_bags = m.trees_.size();
  m.params_.threads = 1;
  m.schema_ = std::move(schema);
  return m;
}

double BaggedTreeModel::predict_proba(std::span<const double> row) const {
  if (row.size() != schema_.features.size()) {
    throw SchemaError("feature vector has " + std::to_string(row.size()) + " values but the model expects " +
                      std::to_string(schema_.features.size()));
  }
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(row);
  return sum / static_cast<double>(trees_.size());
}

std::uint64_t BaggedTreeModel::schema_hash() const { return kpcloud::schema_hash(schema_.features); }

std::vector<char> BaggedTreeModel::serialize() const {
  BinaryWriter w;
  w.put_bytes(std::string_view(kMagic, sizeof kMagic));
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(schema_.version);
  w.put<std::uint32_t>(schema_.feature_mask);
  w.put<std::uint64_t>(schema_hash());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(schema_.features.size()));
  for (const auto& f : schema_.features) {
    w.put_string(f.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(f.kind));
    w.put<std::uint32_t>(f.cardinality);
  }
  w.put<std::uint8_t>(static_cast<std::uint8_t>(params_.tree.algorithm));
  w.put<std::uint64_t>(params_.seed);
  w.put<std::uint64_t>(params_.tree.min_leaf);
  w.put<std::uint64_t>(params_.tree.max_depth);
  w.put<std::uint8_t>(params_.tree.prune ? 1 : 0);
  w.put<double>(params_.tree.confidence);
  w.put<double>(params_.tree.cart_alpha);
  w.put<double>(params_.negative_ratio);
  w.put<std::uint8_t>(params_.bootstrap ? 1 : 0);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(trees_.size()));
  for (const auto& t : trees_) t.write(w);
  auto bytes = w.take();
  Fnv1a64 sum;
  sum.update(bytes.data(), bytes.size());
  BinaryWriter tail;
  tail.put<std::uint64_t>(sum.digest());
  bytes.insert(bytes.end(), tail.buffer().begin(), tail.buffer().end());
  return bytes;
}

BaggedTreeModel BaggedTreeModel::deserialize(std::span<const char> bytes, std::uint32_t expected_schema_version) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw FormatError("not a bagged tree model (bad magic)");
  if (bytes.size() < sizeof kMagic + 8 + 8) throw FormatError("truncated model file");
  {
    BinaryReader tail(bytes.subspan(bytes.size() - 8));
    Fnv1a64 sum;
    sum.update(bytes.data(), bytes.size() - 8);
    if (tail.get<std::uint64_t>() != sum.digest()) throw FormatError("model checksum mismatch (truncated or corrupt)");
  }
  BinaryReader r(bytes.first(bytes.size() - 8));
  r.get_bytes(sizeof kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw VersionError("model container version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kFormatVersion) + ")");
  }
  BaggedTreeModel m;
  m.schema_.version = r.get<std::uint32_t>();
  if (m.schema_.version != expected_schema_version) {
    throw VersionError("model was trained with feature schema v" + std::to_string(m.schema_.version) +
                       " but this build reads v" + std::to_string(expected_schema_version));
  }
  m.schema_.feature_mask = r.get<std::uint32_t>();
  const auto hash = r.get<std::uint64_t>();
  const auto n_features = r.get<std::uint32_t>();
  if (n_features > r.remaining()) throw FormatError("bad feature count");
  for (std::uint32_t i = 0; i < n_features; ++i) {
    FeatureSpec f;
    f.name = r.get_string();
    const auto kind = r.get<std::uint8_t>();
    if (kind > 1) throw FormatError("bad feature kind");
    f.kind = static_cast<FeatureKind>(kind);
    f.cardinality = r.get<std::uint32_t>();
    m.schema_.features.push_back(std::move(f));
  }
  if (hash != m.schema_hash()) throw FormatError("feature schema hash mismatch");
  const auto alg = r.get<std::uint8_t>();
  if (alg > 1) throw FormatError("unknown algorithm tag");
  m.params_.tree.algorithm = static_cast<Algorithm>(alg);
  m.params_.seed = r.get<std::uint64_t>();
  m.params_.tree.min_leaf = r.get<std::uint64_t>();
  m.params_.tree.max_depth = r.get<std::uint64_t>();
  m.params_.tree.prune = r.get<std::uint8_t>() != 0;
  m.params_.tree.confidence = r.get<double>();
  m.params_.tree.cart_alpha = r.get<double>();
  m.params_.negative_ratio = r.get<double>();
  m.params_.bootstrap = r.get<std::uint8_t>() != 0;
  const auto n_trees = r.get<std::uint32_t>();
  if (n_trees == 0 || n_trees > r.remaining()) throw FormatError("bad tree count");
  for (std::uint32_t i = 0; i < n_trees; ++i) {
    auto t = DecisionTree::read(r, n_features);
    if (t.algorithm() != m.params_.tree.algorithm) throw FormatError("tree algorithm tag disagrees with model");
    m.trees_.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in model file");
  m.params_.n_bags = m.trees_.size();
  m.params_.threads = 1;
  return m;
}

void BaggedTreeModel::save(const std::string& path) const { write_file_bytes(path, serialize()); }

BaggedTreeModel BaggedTreeModel::load(const std::string& path, std::uint32_t expected_schema_version) {
  const auto bytes = read_file_bytes(path);
  try {
    return deserialize(bytes, expected_schema_version);
  } catch (const VersionError& e) {
    throw VersionError(path + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0.0;
  double neg = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]]) {
        rank_sum += avg_rank;
        pos += 1.0;
      } else {
        neg += 1.0;
      }
    }
    i = j;
  }
  if (pos == 0.0 || neg == 0.0) return 0.5;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

}  // namespace kpcloud
