#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "kpcloud/candidates.h"
#include "kpcloud/utf8.h"
#include "oracles/candidate_oracle.h"
#include "support.h"

using namespace kpcloud;
using testing::pt;

namespace {

std::set<std::string> surfaces(const std::vector<CandidatePhrase>& cands) {
  std::set<std::string> out;
  for (const auto& c : cands) out.insert(utf8::fold_case(c.surface));
  return out;
}

const CandidatePhrase* find(const std::vector<CandidatePhrase>& cands, const std::string& normalized) {
  for (const auto& c : cands) {
    if (c.normalized == normalized) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("stopword-bounded spans of one sentence") {
  const auto tokens = tokenize("primeiro ministro de portugal", pt());
  const auto s = surfaces(generate_candidates(tokens));
  for (const auto* want : {"primeiro", "ministro", "portugal", "primeiro ministro", "primeiro ministro de portugal",
                           "ministro de portugal"}) {
    CHECK(s.contains(want));
  }
  for (const auto* reject : {"de", "ministro de", "de portugal", "primeiro ministro de"}) CHECK_FALSE(s.contains(reject));
  CHECK(s.size() == 6);
}

TEST_CASE("all-stopword sentence yields nothing") {
  CHECK(generate_candidates(tokenize("de que a o e", pt())).empty());
  CHECK(generate_candidates(std::vector<Token>{}).empty());
}

TEST_CASE("six identical content words give one candidate per length") {
  const auto cands = generate_candidates(tokenize("crise crise crise crise crise crise", pt()));
  REQUIRE(cands.size() == 5);
  for (std::size_t n = 1; n <= 5; ++n) {
    CHECK(cands[n - 1].n_words == n);
    CHECK(cands[n - 1].tf() == 7 - n);
  }
  CHECK(cands[0].tf() == 6);
}

TEST_CASE("candidates never cross a sentence boundary") {
  const auto cands = generate_candidates(tokenize("O banco subiu. Lisboa reage", pt()));
  const auto s = surfaces(cands);
  CHECK(s.contains("banco subiu"));
  CHECK(s.contains("lisboa reage"));
  CHECK_FALSE(s.contains("subiu lisboa"));
  CHECK_FALSE(s.contains("banco subiu lisboa"));
}

TEST_CASE("interior stopwords are allowed, max length respected") {
  const auto tokens = tokenize("banco central de portugal europeu novo", pt());
  const auto cands = generate_candidates(tokens);
  CHECK(surfaces(cands).contains("banco central de portugal europeu"));
  for (const auto& c : cands) CHECK(c.n_words <= 5);
  CandidateOptions two;
  two.max_words = 2;
  for (const auto& c : generate_candidates(tokens, two)) CHECK(c.n_words <= 2);
}

TEST_CASE("merge_occurrences") {
  SUBCASE("two occurrences of one stem merge into tf 2") {
    const auto cands = generate_candidates(tokenize("Governo reage. governos caem", pt()));
    const auto* g = find(cands, "govern");
    REQUIRE(g != nullptr);
    CHECK(g->tf() == 2);
    CHECK(g->surface == "Governo");
  }
  SUBCASE("disjoint forms keep their count") {
    std::vector<CandidatePhrase> in(2);
    in[0] = {"banco", "banc", 1, {{0, 1}}};
    in[1] = {"crise", "cris", 1, {{1, 2}}};
    CHECK(merge_occurrences(in).size() == 2);
  }
  SUBCASE("surface comes from the earliest occurrence regardless of input order") {
    std::vector<CandidatePhrase> in(2);
    in[0] = {"governos", "govern", 1, {{5, 6}}};
    in[1] = {"Governo", "govern", 1, {{1, 2}}};
    const auto out = merge_occurrences(in);
    REQUIRE(out.size() == 1);
    CHECK(out[0].surface == "Governo");
    CHECK(out[0].occurrences == std::vector<Occurrence>{{1, 2}, {5, 6}});
  }
}

TEST_CASE("candidate invariants and verbatim occurrences") {
  const std::string text = "O Governo de Portugal e o Banco de Portugal discutem a crise. A crise do euro continua.";
  const auto doc = testing::make_doc("d", text);
  for (const auto& c : generate_candidates(doc)) {
    CHECK(c.n_words >= 1);
    CHECK(c.n_words <= 5);
    CHECK(c.tf() == c.occurrences.size());
    CHECK(c.tf() >= 1);
    for (const auto& o : c.occurrences) {
      CHECK(o.end - o.begin == c.n_words);
      CHECK_FALSE(doc.tokens[o.begin].is_stopword);
      CHECK_FALSE(doc.tokens[o.end - 1].is_stopword);
      for (std::size_t k = o.begin; k + 1 < o.end; ++k) CHECK_FALSE(doc.tokens[k].sentence_boundary_after);
      // the occurrence is a verbatim slice of the text
      const auto from = doc.tokens[o.begin].char_offset;
      const auto to = doc.tokens[o.end - 1].char_offset + doc.tokens[o.end - 1].surface.size();
      std::string slice = text.substr(from, to - from);
      std::string joined;
      for (std::size_t k = o.begin; k < o.end; ++k) joined += (k > o.begin ? " " : "") + doc.tokens[k].surface;
      CHECK(slice == joined);
    }
    std::string norm;
    for (std::size_t k = c.occurrences[0].begin; k < c.occurrences[0].end; ++k) {
      norm += (k > c.occurrences[0].begin ? " " : "") + doc.tokens[k].stem;
    }
    CHECK(norm == c.normalized);
  }
}

TEST_CASE("output equals brute-force span enumeration") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 500; ++iter) {
    const auto tokens = oracle::random_tokens(rng, rng() % 51);
    const auto cands = generate_candidates(tokens);
    CHECK(oracle::as_map(cands) == oracle::enumerate_spans(tokens));
    for (std::size_t i = 1; i < cands.size(); ++i) {
      const auto& a = cands[i - 1].occurrences.front();
      const auto& b = cands[i].occurrences.front();
      CHECK((a.begin < b.begin || (a.begin == b.begin && a.end < b.end)));
    }
  }
}
