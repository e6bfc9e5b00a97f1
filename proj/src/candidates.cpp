#include "kpcloud/candidates.h"

#include <algorithm>
#include <unordered_map>

namespace kpcloud {

namespace {

std::string join_range(std::span<const Token> tokens, std::size_t begin, std::size_t end,
                       std::string Token::*field) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i].*field;
  }
  return out;
}

void sort_by_first_occurrence(std::vector<CandidatePhrase>& cands) {
  std::sort(cands.begin(), cands.end(), [](const CandidatePhrase& a, const CandidatePhrase& b) {
    const auto& oa = a.occurrences.front();
    const auto& ob = b.occurrences.front();
    if (oa.begin != ob.begin) return oa.begin < ob.begin;
    return oa.end < ob.end;
  });
}

}  // namespace

std::vector<CandidatePhrase> generate_candidates(std::span<const Token> tokens, const CandidateOptions& options) {
  std::vector<CandidatePhrase> spans;
  for (std::size_t begin = 0; begin < tokens.size(); ++begin) {
    if (tokens[begin].is_stopword) continue;
    for (std::size_t len = 1; len <= options.max_words && begin + len <= tokens.size(); ++len) {
      const std::size_t last = begin + len - 1;
      if (!tokens[last].is_stopword) {
        CandidatePhrase c;
        c.surface = join_range(tokens, begin, last + 1, &Token::surface);
        c.normalized = join_range(tokens, begin, last + 1, &Token::stem);
        c.n_words = len;
        c.occurrences.push_back({begin, last + 1});
        spans.push_back(std::move(c));
      }
      if (tokens[last].sentence_boundary_after) break;
    }
  }
  return merge_occurrences(std::move(spans));
}

std::vector<CandidatePhrase> generate_candidates(const NewsDocument& doc, const CandidateOptions& options) {
  return generate_candidates(std::span<const Token>(doc.tokens), options);
}

std::vector<CandidatePhrase> merge_occurrences(std::vector<CandidatePhrase> candidates) {
  std::vector<CandidatePhrase> merged;
  std::unordered_map<std::string, std::size_t> index;
  for (auto& c : candidates) {
    const auto [it, inserted] = index.emplace(c.normalized, merged.size());
    if (inserted) {
      merged.push_back(std::move(c));
      continue;
    }
    auto& target = merged[it->second];
    const bool earlier = !c.occurrences.empty() && !target.occurrences.empty() &&
                         c.occurrences.front().begin < target.occurrences.front().begin;
    if (earlier) target.surface = c.surface;
    target.occurrences.insert(target.occurrences.end(), c.occurrences.begin(), c.occurrences.end());
  }
  for (auto& c : merged) {
    std::sort(c.occurrences.begin(), c.occurrences.end(),
              [](const Occurrence& a, const Occurrence& b) { return a.begin < b.begin; });
  }
  sort_by_first_occurrence(merged);
  return merged;
}

}  // namespace kpcloud
