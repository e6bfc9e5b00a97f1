#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpcloud/corpus.h"
#include "kpcloud/extract.h"

namespace kpcloud {

struct CloudWeights {
  double recency = 0.4;
  double position = 0.3;
  double duplication = 0.3;
};

struct CloudConfig {
  double window_hours = 6.0;
  std::size_t top_news = 10;
  std::size_t keyphrases_per_news = 10;
  std::size_t cloud_size = 20;
  std::optional<std::string> topic_filter;
  CloudWeights weights;
  std::size_t duplicate_min_shared = 3;  // shared keyphrases that make two stories duplicates
  double min_font = 12.0;
  double max_font = 48.0;

  // Throws ValidationError on negative weights, weights not summing to 1,
  // a non-positive window, or zero-sized limits.
  void validate() const;
};

// A document together with its ranked keyphrases (best first).
struct NewsItem {
  const NewsDocument* doc = nullptr;
  std::vector<RankedKeyphrase> keyphrases;
};

struct ScoredNews {
  const NewsItem* item = nullptr;
  double score = 0.0;
  double recency = 0.0;
  double position = 0.0;     // 1 - position_norm
  double duplication = 0.0;  // normalized duplicate count
  std::size_t duplicates = 0;
};

// In-window test: now - window <= t <= now.
bool in_window(Timestamp t, Timestamp now, double window_hours);

// Topic filter, window filter, weighted score, then the best cfg.top_news
// (ties: newer first, then id).
std::vector<ScoredNews> select_top_news(std::span<const NewsItem> items, Timestamp now, const CloudConfig& cfg);

struct CloudEntry {
  std::string phrase;
  std::string normalized;
  std::size_t count = 0;
  std::vector<std::string> doc_ids;  // sorted, unique
};

struct TagCloud {
  std::vector<CloudEntry> entries;
  Timestamp generated_at{};
  std::optional<std::string> topic;
};

// Pools each document's first keyphrases_per_news phrases, groups them by
// normalized form and sums per-document tf. Keeps the cloud_size largest
// counts (ties by phrase).
TagCloud build_cloud(std::span<const NewsItem> top_docs, const CloudConfig& cfg, Timestamp generated_at);
TagCloud build_cloud(std::span<const ScoredNews> top_docs, const CloudConfig& cfg, Timestamp generated_at);

// Linear map of count onto [min_font, max_font]; max_font when all counts agree.
double font_size(std::size_t count, std::size_t min_count, std::size_t max_count, const CloudConfig& cfg);

// Self-contained HTML with an inline SVG; labels read "phrase (count)".
std::string render_cloud_html(const TagCloud& cloud, const CloudConfig& cfg);
void render_cloud(const TagCloud& cloud, const std::string& path, const CloudConfig& cfg);

// {generated_at, topic, entries:[{phrase, count, doc_ids}]}
std::string cloud_to_json(const TagCloud& cloud);

}  // namespace kpcloud
