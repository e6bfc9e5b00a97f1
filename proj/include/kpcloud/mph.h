#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "kpcloud/binary_io.h"
#include "kpcloud/packed_array.h"

namespace kpcloud {

// Hash-and-displace minimal perfect hash. Keys hash (MurmurHash64A, global
// seed) into buckets of ~keys_per_bucket; each bucket stores the displacement
// index d that sends all its keys to free slots:
//   slot(key) = fast_range(splitmix64(h ^ splitmix64(d)), n)
// Any string maps to some slot; membership needs a separate fingerprint.
class MinimalPerfectHash {
 public:
  struct Options {
    double keys_per_bucket = 5.0;
    std::uint64_t seed = 0x6B70636C6F7564ULL;
    int max_attempts = 20;
    std::uint64_t max_displacement = std::uint64_t{1} << 26;
  };

  MinimalPerfectHash() = default;

  // Throws Error if no seed within the retry budget yields a perfect placement.
  // Duplicate keys are a ValidationError.
  static MinimalPerfectHash build(std::span<const std::string> keys, const Options& options);
  static MinimalPerfectHash build(std::span<const std::string> keys) { return build(keys, Options{}); }

  std::uint64_t operator()(std::string_view key) const;

  std::uint64_t size() const { return n_; }
  std::uint64_t bucket_count() const { return n_buckets_; }
  std::uint64_t seed() const { return seed_; }
  int attempts() const { return attempts_; }
  unsigned displacement_bits() const { return displacements_.width(); }
  std::size_t byte_size() const { return 3 * sizeof(std::uint64_t) + displacements_.byte_size(); }

  void write(BinaryWriter& w) const;
  static MinimalPerfectHash read(BinaryReader& r);

  friend bool operator==(const MinimalPerfectHash& a, const MinimalPerfectHash& b) {
    return a.n_ == b.n_ && a.n_buckets_ == b.n_buckets_ && a.seed_ == b.seed_ && a.displacements_ == b.displacements_;
  }

 private:
  std::uint64_t n_ = 0;
  std::uint64_t n_buckets_ = 0;
  std::uint64_t seed_ = 0;
  int attempts_ = 0;
  PackedArray displacements_;
};

}  // namespace kpcloud
