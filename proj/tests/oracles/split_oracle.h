#pragma once

// Exhaustive root-split search, written without the incremental sweep the
// library uses: every (feature, midpoint) or category subset is evaluated by
// direct counting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "kpcloud/dataset.h"

namespace oracle {

struct Split {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double gain_ratio = 0.0;
};

inline double h2(double pos, double n) {
  if (n <= 0 || pos <= 0 || pos >= n) return 0.0;
  const double p = pos / n;
  return -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
}

inline double gini2(double pos, double n) {
  if (n <= 0) return 0.0;
  const double p = pos / n;
  return 1.0 - p * p - (1 - p) * (1 - p);
}

struct Part {
  double n = 0, pos = 0;
};

inline double impurity(bool c45, const Part& p) { return c45 ? h2(p.pos, p.n) : gini2(p.pos, p.n); }

inline double gain_of(bool c45, const Part& all, const std::vector<Part>& parts) {
  double child = 0.0;
  for (const auto& p : parts) child += p.n / all.n * impurity(c45, p);
  return impurity(c45, all) - child;
}

inline double split_info(const Part& all, const std::vector<Part>& parts) {
  double s = 0.0;
  for (const auto& p : parts) {
    if (p.n > 0) s -= p.n / all.n * std::log2(p.n / all.n);
  }
  return s;
}

inline Split best_split(const kpcloud::Dataset& d, bool c45, std::size_t min_leaf) {
  constexpr double eps = 1e-12;
  Part all;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    all.n += 1;
    all.pos += d.label(i);
  }
  std::vector<Split> per_feature;
  for (std::size_t f = 0; f < d.cols(); ++f) {
    Split best;
    best.feature = f;
    if (d.schema[f].kind == kpcloud::FeatureKind::Numeric) {
      std::set<double> distinct;
      for (std::size_t i = 0; i < d.rows(); ++i) distinct.insert(d.at(i, f));
      const std::vector<double> v(distinct.begin(), distinct.end());
      for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        double t = v[k] + (v[k + 1] - v[k]) / 2;
        if (!(t < v[k + 1])) t = v[k];
        std::vector<Part> parts(2);
        for (std::size_t i = 0; i < d.rows(); ++i) {
          auto& p = parts[d.at(i, f) <= t ? 0 : 1];
          p.n += 1;
          p.pos += d.label(i);
        }
        if (parts[0].n < min_leaf || parts[1].n < min_leaf) continue;
        const double g = gain_of(c45, all, parts);
        if (!best.valid || g > best.gain + eps) {
          best.valid = true;
          best.threshold = t;
          best.gain = g;
          best.gain_ratio = c45 ? g / split_info(all, parts) : 0.0;
        }
      }
    } else {
      const auto card = d.schema[f].cardinality;
      if (c45) {
        std::vector<Part> parts(card);
        for (std::size_t i = 0; i < d.rows(); ++i) {
          auto& p = parts[static_cast<std::size_t>(d.at(i, f))];
          p.n += 1;
          p.pos += d.label(i);
        }
        const auto big = std::count_if(parts.begin(), parts.end(), [&](const Part& p) { return p.n >= min_leaf; });
        if (big >= 2) {
          best.valid = true;
          best.gain = gain_of(true, all, parts);
          const double si = split_info(all, parts);
          best.gain_ratio = si > 0 ? best.gain / si : 0.0;
        }
      } else {
        for (std::uint32_t mask = 1; mask + 1 < (1u << card); ++mask) {
          std::vector<Part> parts(2);
          for (std::size_t i = 0; i < d.rows(); ++i) {
            const auto c = static_cast<std::uint32_t>(d.at(i, f));
            auto& p = parts[(mask >> c) & 1 ? 0 : 1];
            p.n += 1;
            p.pos += d.label(i);
          }
          if (parts[0].n < min_leaf || parts[1].n < min_leaf) continue;
          const double g = gain_of(false, all, parts);
          if (!best.valid || g > best.gain + eps) {
            best.valid = true;
            best.gain = g;
          }
        }
      }
    }
    if (best.valid) per_feature.push_back(best);
  }
  if (per_feature.empty()) return {};
  if (!c45) {
    Split best = per_feature[0];
    for (const auto& s : per_feature) {
      if (s.gain > best.gain + eps) best = s;
    }
    return best;
  }
  double avg = 0.0;
  for (const auto& s : per_feature) avg += s.gain;
  avg /= static_cast<double>(per_feature.size());
  Split best;
  for (const auto& s : per_feature) {
    if (s.gain < avg - eps) continue;
    if (!best.valid || s.gain_ratio > best.gain_ratio + eps) best = s;
  }
  return best;
}

// Random dataset: up to max_rows rows, up to max_cols features, a mix of
// small-integer numerics (many ties), continuous numerics and categoricals
// (cardinality <= 4); labels depend noisily on a few columns.
inline kpcloud::Dataset random_dataset(std::mt19937_64& rng, std::size_t max_rows, std::size_t max_cols,
                                       bool categoricals = true) {
  std::uniform_int_distribution<std::size_t> nrows(10, max_rows), ncols(1, max_cols);
  const auto rows = nrows(rng);
  const auto cols = ncols(rng);
  std::vector<kpcloud::FeatureSpec> schema;
  std::vector<int> style(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    style[c] = static_cast<int>(rng() % (categoricals ? 3 : 2));
    kpcloud::FeatureSpec s{"x" + std::to_string(c), kpcloud::FeatureKind::Numeric, 0};
    if (style[c] == 2) {
      s.kind = kpcloud::FeatureKind::Categorical;
      s.cardinality = 2 + static_cast<std::uint32_t>(rng() % 3);
    }
    schema.push_back(s);
  }
  kpcloud::Dataset d(schema);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> row(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double score = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (style[c] == 0) row[c] = static_cast<double>(rng() % 6);
      if (style[c] == 1) row[c] = std::round(u(rng) * 1000) / 100.0;
      if (style[c] == 2) row[c] = static_cast<double>(rng() % schema[c].cardinality);
      if (c < 3) score += row[c] / (style[c] == 1 ? 10.0 : 5.0);
    }
    d.add(row, score / 3.0 + 0.3 * (u(rng) - 0.5) > 0.35);
  }
  return d;
}

}  // namespace oracle
