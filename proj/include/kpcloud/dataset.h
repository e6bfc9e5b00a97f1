#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kpcloud {

enum class FeatureKind : std::uint8_t { Numeric = 0, Categorical = 1 };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::uint32_t cardinality = 0;  // categorical values are 0..cardinality-1

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

std::uint64_t schema_hash(std::span<const FeatureSpec> schema);

// Row-major feature matrix with boolean labels.
struct Dataset {
  std::vector<FeatureSpec> schema;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;

  Dataset() = default;
  explicit Dataset(std::vector<FeatureSpec> s) : schema(std::move(s)) {}

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return schema.size(); }
  double at(std::size_t row, std::size_t col) const { return values[row * schema.size() + col]; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * schema.size(), schema.size()}; }
  bool label(std::size_t i) const { return labels[i] != 0; }
  std::size_t positives() const;

  // Throws SchemaError when the row width does not match the schema.
  void add(std::span<const double> row, bool label);
};

}  // namespace kpcloud
