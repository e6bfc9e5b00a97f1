#include "kpcloud/evaluate.h"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "kpcloud/errors.h"
#include "kpcloud/parallel.h"

namespace kpcloud {

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

DocEvaluation evaluate_document(const std::string& doc_id, std::span<const RankedKeyphrase> extracted,
                                std::span<const std::string> gold, const LanguageResources& resources) {
  DocEvaluation d;
  d.doc_id = doc_id;
  d.n_extracted = extracted.size();
  d.n_gold = normalize_gold(gold, resources).size();
  d.n_identified = match_keyphrases(extracted, gold, resources);
  d.precision = d.n_extracted ? static_cast<double>(d.n_identified) / static_cast<double>(d.n_extracted) : 0.0;
  d.recall = d.n_gold ? static_cast<double>(d.n_identified) / static_cast<double>(d.n_gold) : 0.0;
  d.f1 = f1_score(d.precision, d.recall);
  return d;
}

EvaluationReport summarize(std::vector<DocEvaluation> per_doc, std::size_t n) {
  EvaluationReport rep;
  rep.n = n;
  std::sort(per_doc.begin(), per_doc.end(),
            [](const DocEvaluation& a, const DocEvaluation& b) { return a.doc_id < b.doc_id; });
  rep.per_doc = std::move(per_doc);
  if (rep.per_doc.empty()) return rep;
  for (const auto& d : rep.per_doc) {
    rep.macro.identified += static_cast<double>(d.n_identified);
    rep.macro.precision += d.precision;
    rep.macro.recall += d.recall;
    rep.macro.f1 += d.f1;
  }
  const auto k = static_cast<double>(rep.per_doc.size());
  rep.macro.identified /= k;
  rep.macro.precision /= k;
  rep.macro.recall /= k;
  rep.macro.f1 /= k;
  return rep;
}

std::vector<EvaluationReport> evaluate_sweep(const Corpus& test, const Extractor& extractor,
                                             std::span<const std::size_t> ns, std::size_t threads) {
  for (const auto n : ns) {
    if (n == 0) throw ValidationError("number of keyphrases to extract must be >= 1");
  }
  for (const auto& doc : test.documents) {
    if (!doc.gold_keyphrases) throw ValidationError("test document '" + doc.id + "' has no gold keyphrases");
  }
  extractor.check_schema();
  std::vector<std::vector<RankedKeyphrase>> ranked(test.documents.size());
  parallel_for(test.documents.size(), threads,
               [&](std::size_t i) { ranked[i] = rank_candidates(test.documents[i], extractor); });

  std::vector<EvaluationReport> reports;
  for (const auto n : ns) {
    std::vector<DocEvaluation> per_doc;
    per_doc.reserve(test.documents.size());
    for (std::size_t i = 0; i < test.documents.size(); ++i) {
      const auto& doc = test.documents[i];
      per_doc.push_back(evaluate_document(doc.id, extract_top_n(ranked[i], n), *doc.gold_keyphrases,
                                          extractor.features.resources));
    }
    auto rep = summarize(std::move(per_doc), n);
    rep.features = extractor.features.set.label();
    rep.algorithm = std::string(to_string(extractor.model.algorithm()));
    reports.push_back(std::move(rep));
  }
  return reports;
}

EvaluationReport evaluate(const Corpus& test, const Extractor& extractor, std::size_t n, std::size_t threads) {
  const std::size_t ns[] = {n};
  return std::move(evaluate_sweep(test, extractor, ns, threads).front());
}

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string format_report_table(std::span<const EvaluationReport> reports) {
  const std::vector<std::string> header = {"# Keyphrases Extracted", "Features", "#Keyphrases Identified", "P", "R",
                                           "F1"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    rows.push_back({std::to_string(r.n), r.features.empty() ? "-" : r.features, format_decimal(r.macro.identified),
                    format_decimal(100.0 * r.macro.precision), format_decimal(100.0 * r.macro.recall),
                    format_decimal(100.0 * r.macro.f1)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out += " | ";
      out += cells[c];
      if (c + 1 < cells.size()) out.append(width[c] - cells[c].size(), ' ');
    }
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (const auto w : width) total += w;
  out.append(total + 3 * (width.size() - 1), '-');
  out += "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

std::string report_to_json(std::span<const EvaluationReport> reports) {
  using nlohmann::ordered_json;
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json docs = ordered_json::array();
    for (const auto& d : r.per_doc) {
      docs.push_back({{"doc_id", d.doc_id},
                      {"n_extracted", d.n_extracted},
                      {"n_identified", d.n_identified},
                      {"n_gold", d.n_gold},
                      {"precision", d.precision},
                      {"recall", d.recall},
                      {"f1", d.f1}});
    }
    arr.push_back({{"n", r.n},
                   {"features", r.features},
                   {"algorithm", r.algorithm},
                   {"macro",
                    {{"identified", r.macro.identified},
                     {"precision", r.macro.precision},
                     {"recall", r.macro.recall},
                     {"f1", r.macro.f1}}},
                   {"per_doc", std::move(docs)}});
  }
  return ordered_json{{"reports", std::move(arr)}}.dump(2) + "\n";
}

}  // namespace kpcloud
