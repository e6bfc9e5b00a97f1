#include "kpcloud/extract.h"

#include <algorithm>
#include <unordered_set>

#include "kpcloud/errors.h"
#include "kpcloud/parallel.h"

namespace kpcloud {

bool ranks_before(const RankedKeyphrase& a, const RankedKeyphrase& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
  if (a.first_pos != b.first_pos) return a.first_pos < b.first_pos;
  return a.normalized < b.normalized;
}

void assign_ranks(std::vector<RankedKeyphrase>& phrases) {
  std::sort(phrases.begin(), phrases.end(), ranks_before);
  for (std::size_t i = 0; i < phrases.size(); ++i) phrases[i].rank = i + 1;
}

void Extractor::check_schema() const {
  const auto& schema = model.schema();
  if (schema.version != kFeatureSchemaVersion) {
    throw SchemaError("model feature schema v" + std::to_string(schema.version) + " differs from extractor v" +
                      std::to_string(kFeatureSchemaVersion));
  }
  const auto expected = feature_schema(features.set);
  if (schema.features != expected || schema.feature_mask != features.set.mask()) {
    throw SchemaError("model was trained on feature set '" + FeatureSet::from_mask(schema.feature_mask).label() +
                      "' but the extractor produces '" + features.set.label() + "'");
  }
}

std::vector<RankedKeyphrase> rank_candidates(const NewsDocument& doc, const Extractor& extractor) {
  extractor.check_schema();
  const auto analyzed = analyze_document(doc, extractor.features);
  std::vector<RankedKeyphrase> out;
  out.reserve(analyzed.size());
  for (const auto& a : analyzed) {
    RankedKeyphrase r;
    r.surface = a.candidate.surface;
    r.normalized = a.candidate.normalized;
    r.score = extractor.model.predict_proba(to_row(a.features, extractor.features.set));
    r.tf = a.features.tf;
    r.tfidf = a.features.tfidf;
    r.first_pos = a.features.first_pos;
    out.push_back(std::move(r));
  }
  assign_ranks(out);
  return out;
}

std::vector<RankedKeyphrase> extract_top_n(std::span<const RankedKeyphrase> ranked, std::size_t n) {
  if (n == 0) throw ValidationError("number of keyphrases to extract must be >= 1");
  const auto k = std::min(n, ranked.size());
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<std::string> normalize_gold(std::span<const std::string> gold, const LanguageResources& resources) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& g : gold) {
    auto norm = normalize_phrase(g, resources);
    if (!norm.empty() && seen.insert(norm).second) out.push_back(std::move(norm));
  }
  return out;
}

std::size_t match_keyphrases(std::span<const RankedKeyphrase> extracted, std::span<const std::string> gold,
                             const LanguageResources& resources) {
  const auto forms = normalize_gold(gold, resources);
  std::unordered_set<std::string> unmatched(forms.begin(), forms.end());
  std::size_t matched = 0;
  for (const auto& e : extracted) {
    if (unmatched.erase(e.normalized) > 0) ++matched;
  }
  return matched;
}

TrainingSet build_training_set(const Corpus& corpus, const FeatureContext& ctx, std::size_t threads) {
  struct DocRows {
    std::vector<std::vector<double>> rows;
    std::vector<std::uint8_t> labels;
    std::size_t gold = 0;
    std::size_t covered = 0;
  };
  std::vector<DocRows> per_doc(corpus.documents.size());
  parallel_for(corpus.documents.size(), threads, [&](std::size_t i) {
    const auto& doc = corpus.documents[i];
    if (!doc.gold_keyphrases) throw ValidationError("document '" + doc.id + "' has no gold keyphrases");
    const auto gold = normalize_gold(*doc.gold_keyphrases, ctx.resources);
    const std::unordered_set<std::string> gold_set(gold.begin(), gold.end());
    auto& out = per_doc[i];
    out.gold = gold.size();
    for (const auto& a : analyze_document(doc, ctx)) {
      const bool positive = gold_set.contains(a.candidate.normalized);
      out.covered += positive ? 1 : 0;
      out.rows.push_back(to_row(a.features, ctx.set));
      out.labels.push_back(positive ? 1 : 0);
    }
  });
  TrainingSet ts;
  ts.data = Dataset(feature_schema(ctx.set));
  ts.documents = corpus.documents.size();
  for (std::size_t i = 0; i < per_doc.size(); ++i) {
    for (std::size_t r = 0; r < per_doc[i].rows.size(); ++r) {
      ts.data.add(per_doc[i].rows[r], per_doc[i].labels[r] != 0);
      ts.doc_ids.push_back(corpus.documents[i].id);
    }
    ts.gold_total += per_doc[i].gold;
    ts.gold_covered += per_doc[i].covered;
  }
  return ts;
}

}  // namespace kpcloud
