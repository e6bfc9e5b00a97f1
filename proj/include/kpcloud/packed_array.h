#pragma once

#include <cstdint>
#include <vector>

#include "kpcloud/binary_io.h"

namespace kpcloud {

// Fixed-width unsigned integers packed into 64-bit words.
class PackedArray {
 public:
  PackedArray() = default;
  PackedArray(std::size_t size, unsigned width)
      : size_(size), width_(width), words_((size * width + 63) / 64, 0) {
    if (width > 64) throw std::invalid_argument("PackedArray width must be <= 64");
  }

  std::size_t size() const { return size_; }
  unsigned width() const { return width_; }
  std::size_t byte_size() const { return words_.size() * sizeof(std::uint64_t); }

  std::uint64_t get(std::size_t i) const {
    if (width_ == 0) return 0;
    const std::size_t bit = i * width_;
    const std::size_t word = bit / 64;
    const unsigned offset = bit % 64;
    std::uint64_t v = words_[word] >> offset;
    if (offset + width_ > 64) v |= words_[word + 1] << (64 - offset);
    return v & mask();
  }

  void set(std::size_t i, std::uint64_t value) {
    if (width_ == 0) return;
    value &= mask();
    const std::size_t bit = i * width_;
    const std::size_t word = bit / 64;
    const unsigned offset = bit % 64;
    words_[word] = (words_[word] & ~(mask() << offset)) | (value << offset);
    if (offset + width_ > 64) {
      const unsigned spill = offset + width_ - 64;
      const std::uint64_t hi_mask = (std::uint64_t{1} << spill) - 1;
      words_[word + 1] = (words_[word + 1] & ~hi_mask) | (value >> (64 - offset));
    }
  }

  void write(BinaryWriter& w) const {
    w.put<std::uint64_t>(size_);
    w.put<std::uint32_t>(width_);
    w.put<std::uint64_t>(words_.size());
    for (auto word : words_) w.put<std::uint64_t>(word);
  }

  static PackedArray read(BinaryReader& r) {
    PackedArray a;
    a.size_ = r.get<std::uint64_t>();
    a.width_ = r.get<std::uint32_t>();
    const auto n_words = r.get<std::uint64_t>();
    if (a.width_ > 64 || n_words != (a.size_ * a.width_ + 63) / 64 || n_words * 8 > r.remaining())
      throw FormatError("inconsistent packed array header");
    a.words_.resize(n_words);
    for (auto& word : a.words_) word = r.get<std::uint64_t>();
    return a;
  }

  friend bool operator==(const PackedArray&, const PackedArray&) = default;

 private:
  std::uint64_t mask() const { return width_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_) - 1; }

  std::size_t size_ = 0;
  unsigned width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace kpcloud
