#include "kpcloud/features.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kpcloud/errors.h"
#include "kpcloud/hash.h"
#include "kpcloud/utf8.h"

namespace kpcloud {

std::string_view to_string(PosPattern p) {
  switch (p) {
    case PosPattern::NounOnly:
      return "noun-only";
    case PosPattern::NounPhrase:
      return "noun-phrase";
    case PosPattern::ContainsVerb:
      return "contains-verb";
    case PosPattern::Other:
      return "other";
  }
  return "other";
}

std::uint64_t schema_hash(std::span<const FeatureSpec> schema) {
  Fnv1a64 h;
  for (const auto& f : schema) {
    h.update(f.name);
    const auto kind = static_cast<std::uint8_t>(f.kind);
    h.update(&kind, 1);
    h.update(&f.cardinality, sizeof f.cardinality);
  }
  return h.digest();
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

void Dataset::add(std::span<const double> row, bool label) {
  if (row.size() != schema.size()) {
    throw SchemaError("row has " + std::to_string(row.size()) + " values, schema has " +
                      std::to_string(schema.size()) + " features");
  }
  values.insert(values.end(), row.begin(), row.end());
  labels.push_back(label ? 1 : 0);
}

// ---- feature sets ----

FeatureSet FeatureSet::parse(std::string_view spec) {
  if (spec == "all") return all();
  FeatureSet set = base();
  bool saw_base = false;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto plus = spec.find('+', pos);
    const auto part = spec.substr(pos, plus == std::string_view::npos ? std::string_view::npos : plus - pos);
    if (part == "base") {
      saw_base = true;
    } else if (part == "f1") {
      set.f1 = true;
    } else if (part == "f2") {
      set.f2 = true;
    } else if (part == "f3") {
      set.f3 = true;
    } else if (part == "f4") {
      set.f4 = true;
    } else if (part == "f5") {
      set.f5 = true;
    } else {
      throw ValidationError("unknown feature group '" + std::string(part) + "' in '" + std::string(spec) +
                            "' (expected base, all, or base+f1+...+f5)");
    }
    if (plus == std::string_view::npos) break;
    pos = plus + 1;
  }
  if (!saw_base) throw ValidationError("feature set '" + std::string(spec) + "' must start with base");
  return set;
}

std::string FeatureSet::label() const {
  if (*this == all()) return "all";
  std::string out = "base";
  const bool flags[] = {f1, f2, f3, f4, f5};
  for (int i = 0; i < 5; ++i) {
    if (flags[i]) out += "+f" + std::to_string(i + 1);
  }
  return out;
}

std::uint32_t FeatureSet::mask() const {
  return (f1 ? 1u : 0u) | (f2 ? 2u : 0u) | (f3 ? 4u : 0u) | (f4 ? 8u : 0u) | (f5 ? 16u : 0u);
}

FeatureSet FeatureSet::from_mask(std::uint32_t mask) {
  if (mask > 31) throw FormatError("invalid feature mask " + std::to_string(mask));
  return {(mask & 1u) != 0, (mask & 2u) != 0, (mask & 4u) != 0, (mask & 8u) != 0, (mask & 16u) != 0};
}

std::vector<FeatureSpec> feature_schema(const FeatureSet& set) {
  std::vector<FeatureSpec> s = {
      {"tf", FeatureKind::Numeric, 0},        {"idf", FeatureKind::Numeric, 0},
      {"tfidf", FeatureKind::Numeric, 0},     {"first_pos", FeatureKind::Numeric, 0},
      {"last_pos", FeatureKind::Numeric, 0},  {"spread", FeatureKind::Numeric, 0},
      {"n_words", FeatureKind::Numeric, 0},
  };
  if (set.f1) s.push_back({"f1_chars", FeatureKind::Numeric, 0});
  if (set.f2) s.push_back({"f2_named_entities", FeatureKind::Numeric, 0});
  if (set.f3) s.push_back({"f3_capitals", FeatureKind::Numeric, 0});
  if (set.f4) {
    s.push_back({"f4_pos_noun_frac", FeatureKind::Numeric, 0});
    s.push_back({"f4_pos_pattern", FeatureKind::Categorical, kPosPatternCount});
  }
  if (set.f5) s.push_back({"f5_lm_logprob", FeatureKind::Numeric, 0});
  return s;
}

std::vector<double> to_row(const FeatureVector& fv, const FeatureSet& set) {
  std::vector<double> row = {static_cast<double>(fv.tf), fv.idf,         fv.tfidf, fv.first_pos,
                             fv.last_pos,                fv.spread,      static_cast<double>(fv.n_words)};
  if (set.f1) row.push_back(static_cast<double>(fv.f1_chars));
  if (set.f2) row.push_back(static_cast<double>(fv.f2_named_entities));
  if (set.f3) row.push_back(static_cast<double>(fv.f3_capitals));
  if (set.f4) {
    row.push_back(fv.f4_pos_noun_frac);
    row.push_back(static_cast<double>(static_cast<std::uint8_t>(fv.f4_pos_pattern)));
  }
  if (set.f5) row.push_back(fv.f5_lm_logprob);
  return row;
}

// ---- IDF ----

std::size_t IdfTable::doc_freq(const std::string& normalized) const {
  const auto it = doc_freq_.find(normalized);
  return it == doc_freq_.end() ? 0 : it->second;
}

double IdfTable::idf(const std::string& normalized) const {
  if (doc_count_ == 0) throw ValidationError("IDF table is empty");
  const auto df = std::max<std::size_t>(1, doc_freq(normalized));
  return std::log10(static_cast<double>(doc_count_) / static_cast<double>(df));
}

void IdfTable::add_document(std::span<const CandidatePhrase> candidates) {
  ++doc_count_;
  std::vector<const std::string*> forms;
  forms.reserve(candidates.size());
  for (const auto& c : candidates) forms.push_back(&c.normalized);
  std::sort(forms.begin(), forms.end(), [](auto* a, auto* b) { return *a < *b; });
  forms.erase(std::unique(forms.begin(), forms.end(), [](auto* a, auto* b) { return *a == *b; }), forms.end());
  for (const auto* f : forms) ++doc_freq_[*f];
}

std::string IdfTable::serialize() const {
  std::vector<const std::pair<const std::string, std::size_t>*> sorted;
  sorted.reserve(doc_freq_.size());
  for (const auto& kv : doc_freq_) sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
  std::string out = "kpcloud-idf 1 " + std::to_string(doc_count_) + "\n";
  for (const auto* kv : sorted) {
    out += std::to_string(kv->second);
    out.push_back('\t');
    out += kv->first;
    out.push_back('\n');
  }
  return out;
}

IdfTable IdfTable::parse(std::string_view text, const std::string& source) {
  IdfTable table;
  std::size_t line_no = 0;
  bool header = false;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fail = [&](const std::string& what) {
      return ParseError(source + ":" + std::to_string(line_no) + ": " + what);
    };
    if (!header) {
      constexpr std::string_view magic = "kpcloud-idf ";
      if (!line.starts_with(magic)) throw fail("expected 'kpcloud-idf <version> <doc_count>' header");
      const auto rest = line.substr(magic.size());
      const auto sp = rest.find(' ');
      if (sp == std::string_view::npos) throw fail("malformed IDF header");
      const auto version = rest.substr(0, sp);
      if (version != "1") {
        throw VersionError(source + ": IDF table version " + std::string(version) + " (expected 1)");
      }
      const auto n = rest.substr(sp + 1);
      if (std::from_chars(n.data(), n.data() + n.size(), table.doc_count_).ptr != n.data() + n.size() || n.empty())
        throw fail("malformed document count");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw fail("expected doc_freq<TAB>phrase");
    std::size_t df = 0;
    const auto num = line.substr(0, tab);
    if (std::from_chars(num.data(), num.data() + num.size(), df).ptr != num.data() + num.size() || num.empty())
      throw fail("malformed doc_freq");
    if (df < 1 || df > table.doc_count_) throw fail("doc_freq outside 1..doc_count");
    table.doc_freq_[std::string(line.substr(tab + 1))] = df;
  }
  if (!header) throw ParseError(source + ": empty IDF table");
  return table;
}

void IdfTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << serialize();
  if (!out) throw IoError("write to '" + path + "' failed");
}

IdfTable IdfTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open IDF table '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

IdfTable build_idf(const Corpus& corpus, const CandidateOptions& options) {
  if (corpus.empty()) throw ValidationError("cannot build an IDF table from an empty corpus");
  IdfTable table;
  for (const auto& doc : corpus.documents) table.add_document(generate_candidates(doc, options));
  return table;
}

// ---- base features ----

FeatureVector base_features(const CandidatePhrase& cand, const NewsDocument& doc, const IdfTable& idf) {
  FeatureVector fv;
  fv.tf = cand.tf();
  fv.n_words = cand.n_words;
  fv.idf = idf.idf(cand.normalized);
  const auto words = static_cast<double>(std::max<std::size_t>(1, doc.word_count()));
  fv.tfidf = static_cast<double>(fv.tf) / words * fv.idf;
  if (!cand.occurrences.empty()) {
    fv.first_pos = static_cast<double>(cand.occurrences.front().begin) / words;
    fv.last_pos = static_cast<double>(cand.occurrences.back().begin) / words;
    fv.spread = fv.last_pos - fv.first_pos;
  }
  return fv;
}

// ---- named entities ----

std::size_t tag_named_entities(std::span<const Token> tokens, Occurrence span, const LanguageResources& resources) {
  std::size_t names = 0;
  for (std::size_t i = span.begin; i < span.end && i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (resources.ne_lexicon.contains(t.lower)) {
      ++names;
      continue;
    }
    const bool sentence_initial = i == 0 || tokens[i - 1].sentence_boundary_after;
    const bool stop = resources.stopwords.contains(t.lower);
    if (utf8::starts_upper(t.surface) && !sentence_initial && !stop) ++names;
  }
  return names;
}

std::size_t tag_named_entities(std::span<const Token> words, const LanguageResources& resources) {
  return tag_named_entities(words, Occurrence{0, words.size()}, resources);
}

// ---- POS ----

namespace {

struct SuffixRule {
  std::string_view suffix;
  PosTag tag;
  std::size_t min_length;  // code points of the whole word
};

// Longest suffix first.
constexpr SuffixRule kPortugueseSuffixes[] = {
    {"mentos", PosTag::Noun, 7},     {"mente", PosTag::Adverb, 6},   {"mento", PosTag::Noun, 6},
    {"ências", PosTag::Noun, 7},     {"âncias", PosTag::Noun, 7},    {"dades", PosTag::Noun, 6},
    {"ismos", PosTag::Noun, 6},      {"áveis", PosTag::Adjective, 6}, {"íveis", PosTag::Adjective, 6},
    {"ência", PosTag::Noun, 6},      {"ância", PosTag::Noun, 6},     {"agens", PosTag::Noun, 6},
    {"ções", PosTag::Noun, 5},       {"sões", PosTag::Noun, 5},      {"dade", PosTag::Noun, 5},
    {"ismo", PosTag::Noun, 5},       {"ista", PosTag::Noun, 5},      {"agem", PosTag::Noun, 5},
    {"ável", PosTag::Adjective, 5},  {"ível", PosTag::Adjective, 5}, {"osos", PosTag::Adjective, 5},
    {"osas", PosTag::Adjective, 5},  {"aram", PosTag::Verb, 5},      {"eram", PosTag::Verb, 5},
    {"iram", PosTag::Verb, 5},       {"ando", PosTag::Verb, 5},      {"endo", PosTag::Verb, 5},
    {"indo", PosTag::Verb, 5},       {"avam", PosTag::Verb, 5},      {"ção", PosTag::Noun, 4},
    {"são", PosTag::Noun, 4},        {"eza", PosTag::Noun, 4},       {"oso", PosTag::Adjective, 4},
    {"osa", PosTag::Adjective, 4},   {"ava", PosTag::Verb, 4},
};

constexpr SuffixRule kEnglishSuffixes[] = {
    {"ities", PosTag::Noun, 6},     {"tions", PosTag::Noun, 6},     {"sions", PosTag::Noun, 6},
    {"ments", PosTag::Noun, 6},     {"tion", PosTag::Noun, 5},      {"sion", PosTag::Noun, 5},
    {"ness", PosTag::Noun, 5},      {"ment", PosTag::Noun, 5},      {"ship", PosTag::Noun, 5},
    {"able", PosTag::Adjective, 5}, {"ible", PosTag::Adjective, 5}, {"ity", PosTag::Noun, 4},
    {"ism", PosTag::Noun, 4},       {"ous", PosTag::Adjective, 4},  {"ful", PosTag::Adjective, 4},
    {"ive", PosTag::Adjective, 4},  {"ing", PosTag::Verb, 5},       {"ize", PosTag::Verb, 5},
    {"ise", PosTag::Verb, 5},       {"ly", PosTag::Adverb, 4},      {"ed", PosTag::Verb, 4},
};

}  // namespace

PosTag tag_word(const Token& word, const LanguageResources& resources) {
  if (const auto it = resources.pos_lexicon.find(word.lower); it != resources.pos_lexicon.end()) return it->second;
  if (!utf8::has_letter(word.lower)) return PosTag::Other;
  const std::span<const SuffixRule> rules = resources.language == Language::English
                                                ? std::span<const SuffixRule>(kEnglishSuffixes)
                                                : std::span<const SuffixRule>(kPortugueseSuffixes);
  const auto len = utf8::length(word.lower);
  for (const auto& r : rules) {
    if (len >= r.min_length && std::string_view(word.lower).ends_with(r.suffix)) return r.tag;
  }
  return utf8::starts_upper(word.surface) ? PosTag::Noun : PosTag::Other;
}

PosPattern pos_pattern(std::span<const PosTag> tags) {
  if (tags.empty()) return PosPattern::Other;
  const auto nouns = std::count(tags.begin(), tags.end(), PosTag::Noun);
  const auto verbs = std::count(tags.begin(), tags.end(), PosTag::Verb);
  if (verbs > 0) return PosPattern::ContainsVerb;
  if (nouns == static_cast<std::ptrdiff_t>(tags.size())) return PosPattern::NounOnly;
  if (nouns > 0) return PosPattern::NounPhrase;
  return PosPattern::Other;
}

PosSummary tag_pos(std::span<const Token> words, const LanguageResources& resources) {
  PosSummary out;
  if (words.empty()) return out;
  std::vector<PosTag> tags;
  tags.reserve(words.size());
  for (const auto& w : words) tags.push_back(tag_word(w, resources));
  const auto nouns = std::count(tags.begin(), tags.end(), PosTag::Noun);
  out.noun_frac = static_cast<double>(nouns) / static_cast<double>(tags.size());
  out.pattern = pos_pattern(tags);
  return out;
}

// ---- extended features ----

void extended_features(FeatureVector& fv, const CandidatePhrase& cand, const NewsDocument& doc,
                       const LanguageResources& resources, const PhraseScorer* lm) {
  fv.f1_chars = utf8::length(cand.surface);
  fv.f3_capitals = utf8::count_upper(cand.surface);
  if (cand.occurrences.empty()) return;
  const auto occ = cand.occurrences.front();
  const std::span<const Token> tokens(doc.tokens);
  if (occ.end > tokens.size() || occ.begin >= occ.end) return;
  const auto words = tokens.subspan(occ.begin, occ.end - occ.begin);
  fv.f2_named_entities = tag_named_entities(tokens, occ, resources);
  const auto pos = tag_pos(words, resources);
  fv.f4_pos_noun_frac = pos.noun_frac;
  fv.f4_pos_pattern = pos.pattern;
  if (lm) {
    std::vector<std::string> lower;
    lower.reserve(words.size());
    for (const auto& w : words) lower.push_back(w.lower);
    fv.f5_lm_logprob = lm->phrase_score(lower);
  }
}

std::vector<AnalyzedCandidate> analyze_document(const NewsDocument& doc, const FeatureContext& ctx) {
  if (ctx.set.needs_lm() && !ctx.lm) {
    throw SchemaError("feature set '" + ctx.set.label() + "' includes f5 but no language model was supplied");
  }
  auto cands = generate_candidates(doc, ctx.candidates);
  std::vector<AnalyzedCandidate> out;
  out.reserve(cands.size());
  for (auto& c : cands) {
    AnalyzedCandidate a;
    a.features = base_features(c, doc, ctx.idf);
    extended_features(a.features, c, doc, ctx.resources, ctx.set.f5 ? ctx.lm : nullptr);
    a.candidate = std::move(c);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace kpcloud
