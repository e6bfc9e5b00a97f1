#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kpcloud/errors.h"
#include "kpcloud/ngram_lm.h"
#include "kpcloud/synthetic.h"
#include "oracles/katz_oracle.h"
#include "support.h"

using namespace kpcloud;

namespace {

ArpaModel parse(const std::string& text) {
  std::istringstream in(text);
  return ArpaModel::parse(in);
}

const ArpaModel& tiny() {
  static const auto m = ArpaModel::load(testing::data_path("tiny4.arpa"));
  return m;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

TEST_CASE("small ARPA file header counts") {
  const auto m = parse(
      "\\data\\\nngram 1=3\nngram 2=2\n\n\\1-grams:\n-1.0\ta\t-0.5\n-0.5\tb\n-0.3\tc\n\n\\2-grams:\n-0.2\ta b\n-0.4\tb "
      "c\n\n\\end\\\n");
  CHECK(m.max_order() == 2);
  CHECK(m.count(1) == 3);
  CHECK(m.count(2) == 2);
  CHECK_FALSE(m.has_unk());
  const std::vector<std::string> h = {"a"};
  CHECK(m.log_prob("b", h) == doctest::Approx(-0.2));
  CHECK(m.log_prob("c", h) == doctest::Approx(-0.5 + -0.3));
  CHECK(m.log_prob("zz", h) == kLogProbFloor);
}

TEST_CASE("ARPA parse errors") {
  const std::string good = "\\data\\\nngram 1=1\n\n\\1-grams:\n-1.0\ta\n\n\\end\\\n";
  CHECK_NOTHROW(parse(good));
  CHECK_THROWS_AS(parse("\\data\\\nngram 1=1\n\n\\1-grams:\n-1.0\ta\n"), ParseError);  // missing \end\ .
  CHECK_THROWS_AS(parse("ngram 1=1\n\\1-grams:\n-1.0\ta\n\\end\\\n"), ParseError);     // missing \data\ .
  CHECK_THROWS_AS(parse("\\data\\\nngram 1=2\n\n\\1-grams:\n-1.0\ta\n\n\\end\\\n"), ParseError);  // count
  CHECK_THROWS_AS(parse("\\data\\\nngram 1=2\n\n\\1-grams:\n-1.0\ta\n-1.0\ta\n\n\\end\\\n"), ParseError);  // duplicate
  CHECK_THROWS_AS(parse("\\data\\\nngram 1=1\n\n\\1-grams:\nxyz\ta\n\n\\end\\\n"), ParseError);
  CHECK_THROWS_AS(parse("\\data\\\nngram 1=1\n\n\\2-grams:\n-1.0\ta b\n\n\\end\\\n"), ParseError);  // undeclared
  CHECK_THROWS_AS(parse("\\data\\\nngram 1=1\nngram 3=1\n\n\\1-grams:\n-1\ta\n\n\\3-grams:\n-1\ta a a\n\n\\end\\\n"),
                  ParseError);  // skipped order
  CHECK_THROWS_AS(parse("\\data\\\nngram 1=1\nngram 2=1\n\n\\1-grams:\n-1\ta\n\n\\2-grams:\n-1\ta\n\n\\end\\\n"),
                  ParseError);  // wrong arity
  std::string five = "\\data\\\n";
  for (int k = 1; k <= 5; ++k) five += "ngram " + std::to_string(k) + "=1\n";
  CHECK_THROWS_AS(parse(five), ParseError);
  CHECK_THROWS_AS(ArpaModel::load("/nonexistent.arpa"), IoError);
}

TEST_CASE("-inf maps to the floor") {
  const auto m = parse("\\data\\\nngram 1=2\n\n\\1-grams:\n-inf\t<s>\t-0.3\n-0.1\ta\n\n\\end\\\n");
  CHECK(m.find(std::vector<std::string>{"<s>"})->log10_prob == kLogProbFloor);
}

TEST_CASE("tiny 4-gram model") {
  const auto& m = tiny();
  CHECK(m.max_order() == 4);
  CHECK(m.count(1) == 7);
  CHECK(m.count(2) == 12);
  CHECK(m.count(3) == 9);
  CHECK(m.count(4) == 6);
  CHECK(m.has_unk());
  std::size_t entries = 0;
  for (int k = 1; k <= 4; ++k) entries += m.count(k);
  CHECK(entries <= 100);
}

TEST_CASE("every stored n-gram's prefix is stored one order lower") {
  const auto& m = tiny();
  for (int k = 2; k <= m.max_order(); ++k) {
    for (const auto& [key, e] : m.ngrams(k)) {
      auto words = split(key);
      words.pop_back();
      CHECK(m.find(words) != nullptr);
    }
  }
}

TEST_CASE("log_prob on the tiny model matches the reference values") {
  const auto& m = tiny();
  // frozen from tests/oracles/tiny_arpa.py
  CHECK(m.log_prob("d", split("a b c")) == doctest::Approx(-0.467657).epsilon(1e-9));  // stored 4-gram
  CHECK(m.log_prob("a", split("d d d")) == doctest::Approx(-0.422030).epsilon(1e-9));
  CHECK(m.log_prob("b", split("c a")) == doctest::Approx(-0.134950).epsilon(1e-9));
  CHECK(m.log_prob("d", split("b a c")) == doctest::Approx(-0.122495).epsilon(1e-9));
  CHECK(m.log_prob("c", split("<s> a b")) == doctest::Approx(-0.577621).epsilon(1e-9));
  CHECK(m.log_prob("a", split("zzz")) == doctest::Approx(-0.957052).epsilon(1e-9));
  CHECK(m.log_prob("zzz", split("a")) == doctest::Approx(-1.078272).epsilon(1e-9));
}

TEST_CASE("unseen history backs off through the longest stored prefix") {
  const auto& m = tiny();
  // P(a | c d b): "c d b a", "d b a" missing and neither history stored; "b a" is stored.
  CHECK(m.log_prob("a", split("c d b")) == doctest::Approx(m.find(split("b a"))->log10_prob));
  // P(b | a b c): "a b c b" missing, bow(a b c) = -0.062527; "b c b" missing, bow(b c) = -0.380682;
  // "c b" missing, bow(c) = -0.190058; P(b) = -0.644492.
  CHECK(m.log_prob("b", split("a b c")) == doctest::Approx(-0.062527 - 0.380682 - 0.190058 - 0.644492));
  // extra history words beyond order 3 are ignored
  CHECK(m.log_prob("d", split("d d a b c")) == m.log_prob("d", split("a b c")));
}

TEST_CASE("conditional distributions of the tiny model sum to one") {
  const auto& m = tiny();
  const auto vocab = m.vocabulary();
  for (const auto& h : oracle::all_histories(vocab, 3)) {
    CAPTURE(h.size());
    CHECK(oracle::conditional_mass(m, vocab, h) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("phrase_score") {
  const auto& m = tiny();
  CHECK(m.phrase_score(split("a")) == doctest::Approx(m.log_prob("a", {})));
  const auto ab = split("a b");
  const std::vector<std::string> a = {"a"};
  CHECK(m.phrase_score(ab) == doctest::Approx((m.log_prob("a", {}) + m.log_prob("b", a)) / 2));
  // frozen from tests/oracles/tiny_arpa.py
  CHECK(m.phrase_score(split("a b c d a")) == doctest::Approx(-0.4998626).epsilon(1e-9));
  CHECK(m.phrase_score(split("b a c d b")) == doctest::Approx(-0.5665954).epsilon(1e-9));
  CHECK(m.phrase_score(split("<s> a b c d")) == doctest::Approx(-20.2482698).epsilon(1e-9));
  CHECK(m.phrase_score(split("a b")) == doctest::Approx(-0.719857).epsilon(1e-9));
  CHECK(m.phrase_score({}) == 0.0);
}

TEST_CASE("recursion equals the iterative suffix oracle on random small models") {
  std::mt19937_64 rng(3);
  for (int model = 0; model < 20; ++model) {
    SyntheticLmOptions o;
    o.vocabulary = 6 + model % 4;
    o.higher = {20, 25, 20};
    o.with_unk = model % 2 == 0;
    o.seed = 100 + model;
    const auto m = make_synthetic_lm(o);
    std::size_t entries = 0;
    for (int k = 1; k <= m.max_order(); ++k) entries += m.count(k);
    CHECK(entries <= 100);
    auto vocab = m.vocabulary();
    vocab.push_back("oov");
    for (int q = 0; q < 300; ++q) {
      std::vector<std::string> h(rng() % 5);
      for (auto& w : h) w = vocab[rng() % vocab.size()];
      const auto w = vocab[rng() % vocab.size()];
      CHECK(m.log_prob(w, h) == doctest::Approx(oracle::katz_iterative(m, h, w)).epsilon(1e-12));
    }
    vocab.pop_back();
    for (const auto& h : oracle::all_histories(vocab, 2)) {
      CHECK(oracle::conditional_mass(m, vocab, h) == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("ARPA writer round trip") {
  const auto m = make_synthetic_lm({.vocabulary = 50, .higher = {200, 150, 100}});
  const auto text = m.to_arpa_text();
  const auto back = parse(text);
  for (int k = 1; k <= 4; ++k) {
    REQUIRE(back.count(k) == m.count(k));
    for (const auto& [key, e] : m.ngrams(k)) {
      const auto* b = back.find(split(key));
      REQUIRE(b != nullptr);
      CHECK(b->log10_prob == doctest::Approx(e.log10_prob).epsilon(1e-6));
      CHECK(b->log10_backoff == doctest::Approx(e.log10_backoff).epsilon(1e-6));
    }
  }
  CHECK(back.to_arpa_text() == text);
}

TEST_CASE("synthetic LM sizes and prefix closure") {
  const auto m = make_synthetic_lm({.vocabulary = 200, .higher = {1000, 800, 500}});
  CHECK(m.count(1) == 200);
  CHECK(m.count(2) == 1000);
  CHECK(m.count(3) == 800);
  CHECK(m.count(4) == 500);
  for (int k = 2; k <= 4; ++k) {
    for (const auto& [key, e] : m.ngrams(k)) {
      auto w = split(key);
      w.pop_back();
      CHECK(m.find(w) != nullptr);
    }
  }
}

TEST_CASE("join_words") {
  const std::vector<std::string> w = {"a", "b", "c"};
  CHECK(join_words(w) == "a b c");
  CHECK(join_words({}).empty());
}
