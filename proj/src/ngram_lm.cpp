#include "kpcloud/ngram_lm.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "kpcloud/errors.h"

namespace kpcloud {

std::string join_words(std::span<const std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += words[i];
  }
  return out;
}

double PhraseScorer::phrase_score(std::span<const std::string> words) const {
  if (words.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::size_t h = std::min(i, kMaxPhraseScoreHistory);
    total += log_prob(words[i], words.subspan(i - h, h));
  }
  return total / static_cast<double>(words.size());
}

ArpaModel::ArpaModel(std::vector<OrderMap> orders) : orders_(std::move(orders)) {
  if (orders_.empty() || orders_.size() > kMaxOrder) throw ValidationError("model order must be 1..4");
  for (const char* candidate : {"<unk>", "<UNK>"}) {
    if (orders_[0].contains(candidate)) {
      unk_ = candidate;
      break;
    }
  }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  if (s == "-inf" || s == "-Inf" || s == "-INF") {
    out = kLogProbFloor;
    return true;
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return false;
  out = std::max(out, kLogProbFloor);
  return true;
}

// "\3-grams:" -> 3, otherwise 0.
int section_order(std::string_view line) {
  if (line.size() < 9 || line.front() != '\\' || !line.ends_with("-grams:")) return 0;
  int order = 0;
  const auto digits = line.substr(1, line.size() - 8);
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), order);
  if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) return 0;
  return order;
}

}  // namespace

ArpaModel ArpaModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ARPA file '" + path + "'");
  return parse(in, path);
}

ArpaModel ArpaModel::parse(std::istream& in, const std::string& source) {
  std::string raw;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(source + ":" + std::to_string(line_no) + ": " + what + " (line: '" + raw + "')");
  };

  enum class State { Preamble, Header, Body };
  State state = State::Preamble;
  std::map<int, std::size_t> declared;
  std::vector<OrderMap> orders;
  int current = 0;
  bool ended = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (state == State::Preamble) {
      if (line == "\\data\\") state = State::Header;
      continue;
    }
    if (line.empty()) continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (const int order = section_order(line); order > 0) {
      if (!declared.contains(order)) throw fail("section for undeclared order " + std::to_string(order));
      if (current > 0 && orders[static_cast<std::size_t>(current - 1)].size() != declared[current]) {
        throw fail("order " + std::to_string(current) + " has " +
                   std::to_string(orders[static_cast<std::size_t>(current - 1)].size()) + " entries but header declares " +
                   std::to_string(declared[current]));
      }
      if (state == State::Header) {
        const int max_order = declared.rbegin()->first;
        if (max_order > kMaxOrder) throw fail("order " + std::to_string(max_order) + " exceeds supported maximum 4");
        for (int k = 1; k <= max_order; ++k) {
          if (!declared.contains(k)) throw fail("header skips order " + std::to_string(k));
        }
        orders.resize(static_cast<std::size_t>(max_order));
      }
      state = State::Body;
      current = order;
      continue;
    }
    if (state == State::Header) {
      if (!line.starts_with("ngram ")) throw fail("expected 'ngram N=count' in \\data\\ header");
      const auto rest = trim(line.substr(6));
      const auto eq = rest.find('=');
      if (eq == std::string_view::npos) throw fail("expected 'ngram N=count'");
      int order = 0;
      std::size_t count = 0;
      const auto o = trim(rest.substr(0, eq));
      const auto c = trim(rest.substr(eq + 1));
      if (std::from_chars(o.data(), o.data() + o.size(), order).ec != std::errc{} || order < 1 ||
          std::from_chars(c.data(), c.data() + c.size(), count).ec != std::errc{}) {
        throw fail("malformed ngram count");
      }
      if (declared.contains(order)) throw fail("order declared twice");
      declared[order] = count;
      continue;
    }
    if (state != State::Body) throw fail("entry outside of an n-gram section");
    const auto fields = split_ws(line);
    const auto n = static_cast<std::size_t>(current);
    if (fields.size() != n + 1 && fields.size() != n + 2) {
      throw fail("expected " + std::to_string(n) + " words for a " + std::to_string(n) + "-gram");
    }
    NGramEntry entry;
    if (!parse_double(fields[0], entry.log10_prob)) throw fail("malformed log probability");
    if (fields.size() == n + 2 && !parse_double(fields[n + 1], entry.log10_backoff)) {
      throw fail("malformed back-off weight");
    }
    std::string key(fields[1]);
    for (std::size_t i = 2; i <= n; ++i) {
      key.push_back(' ');
      key.append(fields[i]);
    }
    if (!orders[n - 1].emplace(std::move(key), entry).second) throw fail("duplicate n-gram");
  }

  if (state == State::Preamble) throw ParseError(source + ": missing \\data\\ header");
  if (!ended) throw ParseError(source + ": missing \\end\\ marker");
  if (orders.empty()) throw ParseError(source + ": no n-gram sections");
  for (const auto& [order, count] : declared) {
    if (orders[static_cast<std::size_t>(order - 1)].size() != count) {
      throw ParseError(source + ": order " + std::to_string(order) + " has " +
                       std::to_string(orders[static_cast<std::size_t>(order - 1)].size()) +
                       " entries but header declares " + std::to_string(count));
    }
  }
  return ArpaModel(std::move(orders));
}

const NGramEntry* ArpaModel::find(std::span<const std::string> words) const {
  if (words.empty() || words.size() > orders_.size()) return nullptr;
  const auto& map = orders_[words.size() - 1];
  const auto it = map.find(join_words(words));
  return it == map.end() ? nullptr : &it->second;
}

bool ArpaModel::in_vocab(std::string_view word) const {
  return !orders_.empty() && orders_[0].contains(std::string(word));
}

std::vector<std::string> ArpaModel::vocabulary() const {
  std::vector<std::string> vocab;
  if (orders_.empty()) return vocab;
  vocab.reserve(orders_[0].size());
  for (const auto& [word, entry] : orders_[0]) vocab.push_back(word);
  std::sort(vocab.begin(), vocab.end());
  return vocab;
}

std::string ArpaModel::map_word(std::string_view word) const {
  if (in_vocab(word) || unk_.empty()) return std::string(word);
  return unk_;
}

double ArpaModel::log_prob(std::string_view word, std::span<const std::string> history) const {
  if (orders_.empty()) return kLogProbFloor;
  const std::size_t h_len = std::min(history.size(), orders_.size() - 1);
  std::vector<std::string> ngram;
  ngram.reserve(h_len + 1);
  for (std::size_t i = history.size() - h_len; i < history.size(); ++i) ngram.push_back(map_word(history[i]));
  ngram.push_back(map_word(word));
  if (!orders_[0].contains(ngram.back())) return kLogProbFloor;

  const std::span<const std::string> all(ngram);
  double backoff = 0.0;
  for (std::size_t len = h_len;; --len) {
    const auto suffix = all.subspan(h_len - len);
    if (const auto* e = find(suffix)) return backoff + e->log10_prob;
    // len > 0 here: the unigram lookup above cannot miss.
    if (const auto* ctx = find(suffix.first(len))) backoff += ctx->log10_backoff;
  }
}

void ArpaModel::write(std::ostream& out) const {
  out << "\\data\\\n";
  for (std::size_t k = 0; k < orders_.size(); ++k) out << "ngram " << k + 1 << "=" << orders_[k].size() << "\n";
  char buf[64];
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    out << "\n\\" << k + 1 << "-grams:\n";
    std::vector<const OrderMap::value_type*> sorted;
    sorted.reserve(orders_[k].size());
    for (const auto& kv : orders_[k]) sorted.push_back(&kv);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
    const bool with_backoff = k + 1 < orders_.size();
    for (const auto* kv : sorted) {
      std::snprintf(buf, sizeof buf, "%.6f", kv->second.log10_prob);
      out << buf << '\t' << kv->first;
      if (with_backoff && kv->second.log10_backoff != 0.0) {
        std::snprintf(buf, sizeof buf, "%.6f", kv->second.log10_backoff);
        out << '\t' << buf;
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

std::string ArpaModel::to_arpa_text() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

}  // namespace kpcloud
