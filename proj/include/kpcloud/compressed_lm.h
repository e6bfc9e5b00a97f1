#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpcloud/mph.h"
#include "kpcloud/ngram_lm.h"
#include "kpcloud/packed_array.h"

namespace kpcloud {

struct CompressOptions {
  unsigned fingerprint_bits = 12;  // 8..16
  unsigned quant_bits = 8;         // 4..8
  double backoff_penalty = -0.7;   // log10, added per back-off step at query time
  MinimalPerfectHash::Options mph;
};

// Uniform quantizer over [min, max] of one order. When the order holds floor
// values (<= -98) the top code is reserved for kLogProbFloor and the range is
// split over the remaining codes.
struct Quantizer {
  double min = 0.0;
  double width = 0.0;  // bin width
  std::uint32_t levels = 1;
  bool has_floor_code = false;
  std::vector<double> codebook;  // code -> reconstruction value

  static Quantizer fit(std::span<const double> values, unsigned bits);
  std::uint32_t encode(double v) const;
  double decode(std::uint32_t code) const { return codebook.at(code); }
};

// Key-value store: n-gram -> quantized log10 probability, one perfect hash per
// order, b-bit fingerprints to reject non-keys. Back-off weights are dropped.
class CompressedNGramModel final : public PhraseScorer {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  struct Order {
    MinimalPerfectHash mph;
    PackedArray fingerprints;
    PackedArray codes;
    Quantizer quantizer;
  };

  CompressedNGramModel() = default;

  static CompressedNGramModel compress(const ArpaModel& model, const CompressOptions& options = {});

  // Quantized log10 prob of an exact stored n-gram; nullopt for empty input,
  // n-grams longer than max_order, and (up to fingerprint collisions) non-keys.
  std::optional<double> lookup(std::span<const std::string> words) const;
  std::optional<double> lookup_key(std::string_view joined, std::size_t order) const;

  // Stored n-gram if present; else the penalty (only when the history is itself
  // stored) plus the estimate with the oldest history word dropped. OOV words
  // map to <unk> if stored, else score kLogProbFloor.
  double log_prob(std::string_view word, std::span<const std::string> history) const override;
  int max_order() const override { return static_cast<int>(orders_.size()); }

  std::uint64_t count(int order) const { return orders_.at(static_cast<std::size_t>(order - 1)).mph.size(); }
  const Order& order(int k) const { return orders_.at(static_cast<std::size_t>(k - 1)); }
  unsigned fingerprint_bits() const { return fingerprint_bits_; }
  unsigned quant_bits() const { return quant_bits_; }
  double backoff_penalty() const { return backoff_penalty_; }
  void set_backoff_penalty(double penalty) { backoff_penalty_ = penalty; }
  // Width of one quantization bin for `order`.
  double bin_width(int order) const { return this->order(order).quantizer.width; }

  std::vector<char> serialize() const;
  static CompressedNGramModel deserialize(std::span<const char> bytes);
  void save(const std::string& path) const;
  static CompressedNGramModel load(const std::string& path);
  std::size_t byte_size() const { return serialize().size(); }

  static bool has_magic(std::span<const char> bytes);

 private:
  std::uint64_t fingerprint(std::string_view key) const;

  std::vector<Order> orders_;
  unsigned fingerprint_bits_ = 12;
  unsigned quant_bits_ = 8;
  double backoff_penalty_ = -0.7;
  std::uint64_t fingerprint_seed_ = 0;
  bool has_unk_ = false;
};

struct CompressionReport {
  std::size_t arpa_bytes = 0;
  std::size_t compressed_bytes = 0;
  double ratio() const { return arpa_bytes == 0 ? 0.0 : static_cast<double>(compressed_bytes) / arpa_bytes; }
};

// Either container: ARPA text or a compressed binary (detected by magic).
std::unique_ptr<PhraseScorer> load_phrase_scorer(const std::string& path);

}  // namespace kpcloud
