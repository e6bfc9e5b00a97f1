#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kpcloud/corpus.h"
#include "kpcloud/extract.h"

namespace kpcloud {

// Harmonic mean; 0 when p + r == 0.
double f1_score(double precision, double recall);

struct DocEvaluation {
  std::string doc_id;
  std::size_t n_extracted = 0;
  std::size_t n_identified = 0;
  std::size_t n_gold = 0;
  double precision = 0.0;  // fractions in [0, 1]
  double recall = 0.0;
  double f1 = 0.0;
};

DocEvaluation evaluate_document(const std::string& doc_id, std::span<const RankedKeyphrase> extracted,
                                std::span<const std::string> gold, const LanguageResources& resources);

struct MacroScores {
  double identified = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvaluationReport {
  std::size_t n = 0;          // keyphrases extracted per document
  std::string features;       // feature set label
  std::string algorithm;
  std::vector<DocEvaluation> per_doc;  // sorted by doc_id
  MacroScores macro;
};

// Sorts per_doc by id and averages.
EvaluationReport summarize(std::vector<DocEvaluation> per_doc, std::size_t n);

// Extracts the top n of every test document and scores it. Every document must
// carry gold keyphrases.
EvaluationReport evaluate(const Corpus& test, const Extractor& extractor, std::size_t n, std::size_t threads = 1);
// One ranking pass, several cut-offs.
std::vector<EvaluationReport> evaluate_sweep(const Corpus& test, const Extractor& extractor,
                                             std::span<const std::size_t> ns, std::size_t threads = 1);

// Columns: # Keyphrases Extracted | Features | #Keyphrases Identified | P | R | F1
// (P, R, F1 in percent).
std::string format_report_table(std::span<const EvaluationReport> reports);
std::string report_to_json(std::span<const EvaluationReport> reports);

// Shortest of %.2f with trailing zeros removed ("8.5", "30", "28.33").
std::string format_decimal(double v);

}  // namespace kpcloud
