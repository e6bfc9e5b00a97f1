#include "kpcloud/mph.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "kpcloud/errors.h"
#include "kpcloud/hash.h"

namespace kpcloud {

namespace {

inline std::uint64_t displaced_slot(std::uint64_t h, std::uint64_t d, std::uint64_t n) {
  return fast_range(splitmix64(h ^ splitmix64(d)), n);
}

// Returns the per-bucket displacements, or nullopt when this seed fails.
std::optional<std::vector<std::uint64_t>> place(const std::vector<std::uint64_t>& hashes, std::uint64_t n_buckets,
                                                std::uint64_t max_displacement) {
  const std::uint64_t n = hashes.size();
  std::vector<std::uint32_t> bucket_of(n);
  std::vector<std::uint32_t> bucket_size(n_buckets, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    bucket_of[i] = static_cast<std::uint32_t>(fast_range(hashes[i], n_buckets));
    ++bucket_size[bucket_of[i]];
  }
  // Counting sort of keys by bucket.
  std::vector<std::uint32_t> start(n_buckets + 1, 0);
  for (std::uint64_t b = 0; b < n_buckets; ++b) start[b + 1] = start[b] + bucket_size[b];
  std::vector<std::uint64_t> members(n);
  {
    auto fill = start;
    for (std::uint64_t i = 0; i < n; ++i) members[fill[bucket_of[i]]++] = hashes[i];
  }
  std::vector<std::uint32_t> order(n_buckets);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return bucket_size[a] > bucket_size[b]; });

  std::vector<std::uint64_t> displacement(n_buckets, 0);
  std::vector<bool> taken(n, false);
  std::vector<std::uint64_t> slots;
  for (const auto b : order) {
    if (bucket_size[b] == 0) break;
    const std::span<const std::uint64_t> keys(members.data() + start[b], bucket_size[b]);
    bool placed = false;
    for (std::uint64_t d = 0; d < max_displacement && !placed; ++d) {
      slots.clear();
      placed = true;
      for (const auto h : keys) {
        const auto s = displaced_slot(h, d, n);
        if (taken[s] || std::find(slots.begin(), slots.end(), s) != slots.end()) {
          placed = false;
          break;
        }
        slots.push_back(s);
      }
      if (placed) {
        displacement[b] = d;
        for (const auto s : slots) taken[s] = true;
      }
    }
    if (!placed) return std::nullopt;
  }
  return displacement;
}

}  // namespace

MinimalPerfectHash MinimalPerfectHash::build(std::span<const std::string> keys, const Options& options) {
  if (options.keys_per_bucket <= 0.0) throw ValidationError("keys_per_bucket must be positive");
  MinimalPerfectHash mph;
  mph.n_ = keys.size();
  if (keys.empty()) {
    mph.seed_ = options.seed;
    return mph;
  }
  mph.n_buckets_ = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil(static_cast<double>(keys.size()) / options.keys_per_bucket)));

  std::uint64_t seed = options.seed;
  std::vector<std::uint64_t> hashes(keys.size());
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    for (std::size_t i = 0; i < keys.size(); ++i) hashes[i] = murmur64a(keys[i], seed);
    auto sorted = hashes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      std::vector<std::string> copy(keys.begin(), keys.end());
      std::sort(copy.begin(), copy.end());
      if (const auto dup = std::adjacent_find(copy.begin(), copy.end()); dup != copy.end())
        throw ValidationError("duplicate key '" + *dup + "' in perfect hash input");
    } else if (auto disp = place(hashes, mph.n_buckets_, options.max_displacement)) {
      const auto max_d = *std::max_element(disp->begin(), disp->end());
      mph.displacements_ = PackedArray(disp->size(), static_cast<unsigned>(std::bit_width(max_d)));
      for (std::size_t b = 0; b < disp->size(); ++b) mph.displacements_.set(b, (*disp)[b]);
      mph.seed_ = seed;
      mph.attempts_ = attempt;
      return mph;
    }
    seed = splitmix64(seed + static_cast<std::uint64_t>(attempt));
  }
  throw Error("minimal perfect hash construction failed for " + std::to_string(keys.size()) + " keys after " +
              std::to_string(options.max_attempts) + " attempts; retry with a different seed");
}

std::uint64_t MinimalPerfectHash::operator()(std::string_view key) const {
  if (n_ == 0) return 0;
  const auto h = murmur64a(key, seed_);
  return displaced_slot(h, displacements_.get(fast_range(h, n_buckets_)), n_);
}

void MinimalPerfectHash::write(BinaryWriter& w) const {
  w.put<std::uint64_t>(n_);
  w.put<std::uint64_t>(n_buckets_);
  w.put<std::uint64_t>(seed_);
  displacements_.write(w);
}

MinimalPerfectHash MinimalPerfectHash::read(BinaryReader& r) {
  MinimalPerfectHash mph;
  mph.n_ = r.get<std::uint64_t>();
  mph.n_buckets_ = r.get<std::uint64_t>();
  mph.seed_ = r.get<std::uint64_t>();
  mph.displacements_ = PackedArray::read(r);
  if ((mph.n_ > 0) != (mph.n_buckets_ > 0) || mph.displacements_.size() != mph.n_buckets_)
    throw FormatError("inconsistent perfect hash header");
  return mph;
}

}  // namespace kpcloud
