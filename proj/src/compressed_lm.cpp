#include "kpcloud/compressed_lm.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "kpcloud/binary_io.h"
#include "kpcloud/errors.h"
#include "kpcloud/hash.h"

namespace kpcloud {

namespace {

constexpr char kMagic[8] = {'K', 'P', 'C', 'L', 'M', 'P', 'H', 'F'};
constexpr std::uint64_t kFingerprintSeed = 0x9AE16A3B2F90404FULL;
constexpr double kFloorThreshold = -98.0;
const std::string kUnk = "<unk>";

bool is_floor(double v) { return v <= kFloorThreshold; }

}  // namespace

Quantizer Quantizer::fit(std::span<const double> values, unsigned bits) {
  if (bits < 1 || bits > 16) throw ValidationError("quantizer bits must be 1..16");
  Quantizer q;
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const double v : values) {
    if (is_floor(v)) {
      q.has_floor_code = true;
      continue;
    }
    if (!any) {
      lo = hi = v;
      any = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const std::uint32_t codes = std::uint32_t{1} << bits;
  q.levels = q.has_floor_code ? codes - 1 : codes;
  if (q.levels == 0) throw ValidationError("quantizer needs at least 2 bits when floor values are present");
  q.min = lo;
  q.width = (hi - lo) / q.levels;
  q.codebook.resize(codes);
  for (std::uint32_t c = 0; c < q.levels; ++c) q.codebook[c] = q.min + (c + 0.5) * q.width;
  if (q.has_floor_code) q.codebook[codes - 1] = kLogProbFloor;
  return q;
}

std::uint32_t Quantizer::encode(double v) const {
  if (has_floor_code && is_floor(v)) return static_cast<std::uint32_t>(codebook.size() - 1);
  if (width <= 0.0) return 0;
  const double pos = std::floor((v - min) / width);
  if (pos <= 0.0) return 0;
  return std::min(static_cast<std::uint32_t>(pos), levels - 1);
}

std::uint64_t CompressedNGramModel::fingerprint(std::string_view key) const {
  return murmur64a(key, fingerprint_seed_) >> (64 - fingerprint_bits_);
}

CompressedNGramModel CompressedNGramModel::compress(const ArpaModel& model, const CompressOptions& options) {
  if (options.fingerprint_bits < 8 || options.fingerprint_bits > 16)
    throw ValidationError("fingerprint bits must be in 8..16 (got " + std::to_string(options.fingerprint_bits) + ")");
  if (options.quant_bits < 4 || options.quant_bits > 8)
    throw ValidationError("quantization bits must be in 4..8 (got " + std::to_string(options.quant_bits) + ")");
  if (model.max_order() < 1) throw ValidationError("cannot compress an empty model");

  CompressedNGramModel cm;
  cm.fingerprint_bits_ = options.fingerprint_bits;
  cm.quant_bits_ = options.quant_bits;
  cm.backoff_penalty_ = options.backoff_penalty;
  cm.fingerprint_seed_ = kFingerprintSeed;
  cm.has_unk_ = model.in_vocab(kUnk);

  for (int k = 1; k <= model.max_order(); ++k) {
    const auto& map = model.ngrams(k);
    std::vector<std::string> keys;
    std::vector<double> probs;
    keys.reserve(map.size());
    for (const auto& [key, entry] : map) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    probs.reserve(keys.size());
    for (const auto& key : keys) probs.push_back(map.at(key).log10_prob);

    Order order;
    auto mph_options = options.mph;
    mph_options.seed = splitmix64(options.mph.seed + static_cast<std::uint64_t>(k));
    order.mph = MinimalPerfectHash::build(keys, mph_options);
    order.quantizer = Quantizer::fit(probs, cm.quant_bits_);
    order.fingerprints = PackedArray(keys.size(), cm.fingerprint_bits_);
    order.codes = PackedArray(keys.size(), cm.quant_bits_);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const auto slot = order.mph(keys[i]);
      order.fingerprints.set(slot, cm.fingerprint(keys[i]));
      order.codes.set(slot, order.quantizer.encode(probs[i]));
    }
    cm.orders_.push_back(std::move(order));
  }
  return cm;
}

std::optional<double> CompressedNGramModel::lookup_key(std::string_view joined, std::size_t order_len) const {
  if (joined.empty() || order_len == 0 || order_len > orders_.size()) return std::nullopt;
  const auto& o = orders_[order_len - 1];
  if (o.mph.size() == 0) return std::nullopt;
  const auto slot = o.mph(joined);
  if (o.fingerprints.get(slot) != fingerprint(joined)) return std::nullopt;
  return o.quantizer.decode(static_cast<std::uint32_t>(o.codes.get(slot)));
}

std::optional<double> CompressedNGramModel::lookup(std::span<const std::string> words) const {
  if (words.empty()) return std::nullopt;
  return lookup_key(join_words(words), words.size());
}

double CompressedNGramModel::log_prob(std::string_view word, std::span<const std::string> history) const {
  if (orders_.empty()) return kLogProbFloor;
  const auto map_word = [&](std::string_view w) -> std::string {
    if (lookup_key(w, 1) || !has_unk_) return std::string(w);
    return kUnk;
  };
  const std::size_t h_len = std::min(history.size(), orders_.size() - 1);
  std::vector<std::string> ngram;
  ngram.reserve(h_len + 1);
  for (std::size_t i = history.size() - h_len; i < history.size(); ++i) ngram.push_back(map_word(history[i]));
  ngram.push_back(map_word(word));
  if (!lookup_key(ngram.back(), 1)) return kLogProbFloor;

  const std::span<const std::string> all(ngram);
  double penalty = 0.0;
  for (std::size_t len = h_len;; --len) {
    const auto suffix = all.subspan(h_len - len);
    if (const auto v = lookup(suffix)) return penalty + *v;
    if (lookup(suffix.first(len))) penalty += backoff_penalty_;
  }
}

std::vector<char> CompressedNGramModel::serialize() const {
  BinaryWriter w;
  w.put_bytes(std::string_view(kMagic, sizeof kMagic));
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(orders_.size()));
  w.put<std::uint32_t>(fingerprint_bits_);
  w.put<std::uint32_t>(quant_bits_);
  w.put<double>(backoff_penalty_);
  w.put<std::uint64_t>(fingerprint_seed_);
  w.put<std::uint8_t>(has_unk_ ? 1 : 0);
  for (const auto& o : orders_) {
    o.mph.write(w);
    o.fingerprints.write(w);
    o.codes.write(w);
    w.put<double>(o.quantizer.min);
    w.put<double>(o.quantizer.width);
    w.put<std::uint32_t>(o.quantizer.levels);
    w.put<std::uint8_t>(o.quantizer.has_floor_code ? 1 : 0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(o.quantizer.codebook.size()));
    for (const double c : o.quantizer.codebook) w.put<double>(c);
  }
  auto bytes = w.take();
  Fnv1a64 sum;
  sum.update(bytes.data(), bytes.size());
  BinaryWriter tail;
  tail.put<std::uint64_t>(sum.digest());
  bytes.insert(bytes.end(), tail.buffer().begin(), tail.buffer().end());
  return bytes;
}

bool CompressedNGramModel::has_magic(std::span<const char> bytes) {
  return bytes.size() >= sizeof kMagic && std::memcmp(bytes.data(), kMagic, sizeof kMagic) == 0;
}

CompressedNGramModel CompressedNGramModel::deserialize(std::span<const char> bytes) {
  if (!has_magic(bytes)) throw FormatError("not a compressed language model (bad magic)");
  if (bytes.size() < sizeof kMagic + 12 + 8) throw FormatError("truncated compressed language model");
  {
    BinaryReader tail(bytes.subspan(bytes.size() - 8));
    Fnv1a64 sum;
    sum.update(bytes.data(), bytes.size() - 8);
    if (tail.get<std::uint64_t>() != sum.digest()) throw FormatError("compressed language model checksum mismatch");
  }
  BinaryReader r(bytes.first(bytes.size() - 8));
  r.get_bytes(sizeof kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw VersionError("compressed language model format version " + std::to_string(version) +
                       " is not supported (expected " + std::to_string(kFormatVersion) + ")");
  }
  CompressedNGramModel cm;
  const auto n_orders = r.get<std::uint32_t>();
  cm.fingerprint_bits_ = r.get<std::uint32_t>();
  cm.quant_bits_ = r.get<std::uint32_t>();
  cm.backoff_penalty_ = r.get<double>();
  cm.fingerprint_seed_ = r.get<std::uint64_t>();
  cm.has_unk_ = r.get<std::uint8_t>() != 0;
  if (n_orders < 1 || n_orders > static_cast<std::uint32_t>(ArpaModel::kMaxOrder) || cm.fingerprint_bits_ < 8 ||
      cm.fingerprint_bits_ > 16 || cm.quant_bits_ < 1 || cm.quant_bits_ > 16) {
    throw FormatError("compressed language model header out of range");
  }
  for (std::uint32_t k = 0; k < n_orders; ++k) {
    Order o;
    o.mph = MinimalPerfectHash::read(r);
    o.fingerprints = PackedArray::read(r);
    o.codes = PackedArray::read(r);
    o.quantizer.min = r.get<double>();
    o.quantizer.width = r.get<double>();
    o.quantizer.levels = r.get<std::uint32_t>();
    o.quantizer.has_floor_code = r.get<std::uint8_t>() != 0;
    const auto cb = r.get<std::uint32_t>();
    if (cb != (std::uint32_t{1} << cm.quant_bits_) || o.quantizer.levels > cb || o.fingerprints.size() != o.mph.size() ||
        o.codes.size() != o.mph.size() || o.fingerprints.width() != cm.fingerprint_bits_ ||
        o.codes.width() != cm.quant_bits_) {
      throw FormatError("inconsistent order section in compressed language model");
    }
    o.quantizer.codebook.resize(cb);
    for (auto& c : o.quantizer.codebook) c = r.get<double>();
    cm.orders_.push_back(std::move(o));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in compressed language model");
  return cm;
}

void CompressedNGramModel::save(const std::string& path) const { write_file_bytes(path, serialize()); }

CompressedNGramModel CompressedNGramModel::load(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return deserialize(bytes);
  } catch (const FormatError& e) {
    if (dynamic_cast<const VersionError*>(&e)) throw VersionError(path + ": " + e.what());
    throw FormatError(path + ": " + e.what());
  }
}

std::unique_ptr<PhraseScorer> load_phrase_scorer(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (CompressedNGramModel::has_magic(bytes)) {
    try {
      return std::make_unique<CompressedNGramModel>(CompressedNGramModel::deserialize(bytes));
    } catch (const VersionError& e) {
      throw VersionError(path + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what());
    }
  }
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  return std::make_unique<ArpaModel>(ArpaModel::parse(in, path));
}

}  // namespace kpcloud
