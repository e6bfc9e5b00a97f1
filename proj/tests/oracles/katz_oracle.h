#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kpcloud/ngram_lm.h"

namespace oracle {

// Katz back-off written as a loop over history suffixes instead of recursion:
// find the longest stored (suffix, w); add the back-off of every longer
// stored suffix.
inline double katz_iterative(const kpcloud::ArpaModel& m, std::vector<std::string> history, std::string w) {
  const auto map = [&](const std::string& x) {
    return m.in_vocab(x) ? x : (m.has_unk() ? m.unk_token() : std::string());
  };
  w = map(w);
  if (w.empty()) return kpcloud::kLogProbFloor;
  for (auto& h : history) h = map(h);
  const std::size_t keep = std::min<std::size_t>(history.size(), m.max_order() - 1);
  history.erase(history.begin(), history.end() - keep);
  double bow_sum = 0.0;
  for (std::size_t start = 0; start <= history.size(); ++start) {
    std::vector<std::string> key(history.begin() + start, history.end());
    key.push_back(w);
    bool unknown_word = false;
    for (const auto& k : key) unknown_word = unknown_word || k.empty();
    const auto* hit = unknown_word ? nullptr : m.find(key);
    if (hit) return bow_sum + hit->log10_prob;
    key.pop_back();
    if (!key.empty()) {
      bool ok = true;
      for (const auto& k : key) ok = ok && !k.empty();
      if (ok) {
        if (const auto* ctx = m.find(key)) bow_sum += ctx->log10_backoff;
      }
    }
  }
  return kpcloud::kLogProbFloor;
}

// Sum over the vocabulary of 10^log_prob(w | history).
template <class Model>
double conditional_mass(const Model& m, const std::vector<std::string>& vocab, const std::vector<std::string>& history) {
  double s = 0.0;
  for (const auto& w : vocab) s += std::pow(10.0, m.log_prob(w, history));
  return s;
}

// Every history of length 0..max_len over vocab.
inline std::vector<std::vector<std::string>> all_histories(const std::vector<std::string>& vocab, std::size_t max_len) {
  std::vector<std::vector<std::string>> out = {{}};
  std::vector<std::vector<std::string>> frontier = {{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& h : frontier) {
      for (const auto& w : vocab) {
        auto e = h;
        e.push_back(w);
        next.push_back(e);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace oracle
