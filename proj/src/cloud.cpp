#include "kpcloud/cloud.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "kpcloud/errors.h"
#include "kpcloud/utf8.h"

namespace kpcloud {

void CloudConfig::validate() const {
  if (!(window_hours > 0.0)) throw ValidationError("window_hours must be positive");
  if (top_news == 0 || keyphrases_per_news == 0 || cloud_size == 0)
    throw ValidationError("top_news, keyphrases_per_news and cloud_size must be >= 1");
  if (weights.recency < 0.0 || weights.position < 0.0 || weights.duplication < 0.0)
    throw ValidationError("cloud weights must be non-negative");
  if (std::abs(weights.recency + weights.position + weights.duplication - 1.0) > 1e-9)
    throw ValidationError("cloud weights must sum to 1");
  if (!(min_font > 0.0) || max_font < min_font) throw ValidationError("font sizes must satisfy 0 < min <= max");
}

bool in_window(Timestamp t, Timestamp now, double window_hours) {
  const auto window = std::chrono::milliseconds(std::llround(window_hours * 3600.0 * 1000.0));
  return t <= now && t >= now - window;
}

namespace {

bool topic_ok(const NewsDocument& doc, const CloudConfig& cfg) {
  return !cfg.topic_filter || (doc.topic && *doc.topic == *cfg.topic_filter);
}

std::vector<std::string> top_forms(const NewsItem& item, std::size_t k) {
  std::vector<std::string> forms;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < item.keyphrases.size() && forms.size() < k; ++i) {
    if (seen.insert(item.keyphrases[i].normalized).second) forms.push_back(item.keyphrases[i].normalized);
  }
  return forms;
}

}  // namespace

std::vector<ScoredNews> select_top_news(std::span<const NewsItem> items, Timestamp now, const CloudConfig& cfg) {
  cfg.validate();
  std::vector<const NewsItem*> pool;
  for (const auto& it : items) {
    if (!it.doc) throw ValidationError("news item without a document");
    if (topic_ok(*it.doc, cfg) && in_window(it.doc->broadcast_time, now, cfg.window_hours)) pool.push_back(&it);
  }
  std::vector<ScoredNews> scored(pool.size());
  if (pool.empty()) return scored;

  auto tmin = pool.front()->doc->broadcast_time;
  auto tmax = tmin;
  std::map<std::pair<std::string, std::string>, std::size_t> max_position;
  for (const auto* p : pool) {
    tmin = std::min(tmin, p->doc->broadcast_time);
    tmax = std::max(tmax, p->doc->broadcast_time);
    auto& m = max_position[{p->doc->channel, p->doc->program}];
    m = std::max(m, p->doc->position_in_program);
  }

  std::vector<std::vector<std::string>> forms(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    forms[i] = top_forms(*pool[i], cfg.keyphrases_per_news);
    std::sort(forms[i].begin(), forms[i].end());
  }
  std::vector<std::size_t> dups(pool.size(), 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      std::vector<std::string> shared;
      std::set_intersection(forms[i].begin(), forms[i].end(), forms[j].begin(), forms[j].end(),
                            std::back_inserter(shared));
      if (shared.size() >= cfg.duplicate_min_shared) {
        ++dups[i];
        ++dups[j];
      }
    }
  }
  const auto [dmin_it, dmax_it] = std::minmax_element(dups.begin(), dups.end());
  const double dmin = static_cast<double>(*dmin_it);
  const double dmax = static_cast<double>(*dmax_it);
  const double span_ms = static_cast<double>((tmax - tmin).count());

  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& doc = *pool[i]->doc;
    auto& s = scored[i];
    s.item = pool[i];
    s.recency = span_ms > 0.0 ? static_cast<double>((doc.broadcast_time - tmin).count()) / span_ms : 1.0;
    const auto maxp = max_position[{doc.channel, doc.program}];
    const double position_norm =
        maxp > 0 ? static_cast<double>(doc.position_in_program) / static_cast<double>(maxp) : 0.0;
    s.position = 1.0 - position_norm;
    s.duplicates = dups[i];
    s.duplication = dmax > dmin ? (static_cast<double>(dups[i]) - dmin) / (dmax - dmin) : 0.0;
    s.score = cfg.weights.recency * s.recency + cfg.weights.position * s.position +
              cfg.weights.duplication * s.duplication;
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredNews& a, const ScoredNews& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.item->doc->broadcast_time != b.item->doc->broadcast_time)
      return a.item->doc->broadcast_time > b.item->doc->broadcast_time;
    return a.item->doc->id < b.item->doc->id;
  });
  if (scored.size() > cfg.top_news) scored.resize(cfg.top_news);
  return scored;
}

TagCloud build_cloud(std::span<const NewsItem> top_docs, const CloudConfig& cfg, Timestamp generated_at) {
  cfg.validate();
  TagCloud cloud;
  cloud.generated_at = generated_at;
  cloud.topic = cfg.topic_filter;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& item : top_docs) {
    if (!item.doc) throw ValidationError("news item without a document");
    if (!topic_ok(*item.doc, cfg)) continue;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < item.keyphrases.size() && seen.size() < cfg.keyphrases_per_news; ++i) {
      const auto& kp = item.keyphrases[i];
      if (!seen.insert(kp.normalized).second) continue;
      auto [it, inserted] = index.emplace(kp.normalized, cloud.entries.size());
      if (inserted) cloud.entries.push_back({kp.surface, kp.normalized, 0, {}});
      auto& e = cloud.entries[it->second];
      e.count += std::max<std::size_t>(1, kp.tf);
      e.doc_ids.push_back(item.doc->id);
    }
  }
  for (auto& e : cloud.entries) {
    std::sort(e.doc_ids.begin(), e.doc_ids.end());
    e.doc_ids.erase(std::unique(e.doc_ids.begin(), e.doc_ids.end()), e.doc_ids.end());
  }
  std::stable_sort(cloud.entries.begin(), cloud.entries.end(), [](const CloudEntry& a, const CloudEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.phrase != b.phrase) return a.phrase < b.phrase;
    return a.normalized < b.normalized;
  });
  if (cloud.entries.size() > cfg.cloud_size) cloud.entries.resize(cfg.cloud_size);
  return cloud;
}

TagCloud build_cloud(std::span<const ScoredNews> top_docs, const CloudConfig& cfg, Timestamp generated_at) {
  std::vector<NewsItem> items;
  items.reserve(top_docs.size());
  for (const auto& s : top_docs) items.push_back(*s.item);
  return build_cloud(std::span<const NewsItem>(items), cfg, generated_at);
}

double font_size(std::size_t count, std::size_t min_count, std::size_t max_count, const CloudConfig& cfg) {
  if (max_count <= min_count) return cfg.max_font;
  const double t = (static_cast<double>(count) - static_cast<double>(min_count)) /
                   (static_cast<double>(max_count) - static_cast<double>(min_count));
  return cfg.min_font + std::clamp(t, 0.0, 1.0) * (cfg.max_font - cfg.min_font);
}

namespace {

std::string escape_xml(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&#39;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

struct Box {
  double x0, y0, x1, y1;
  bool overlaps(const Box& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
};

constexpr double kWidth = 900.0;
constexpr double kHeight = 560.0;

}  // namespace

std::string render_cloud_html(const TagCloud& cloud, const CloudConfig& cfg) {
  std::string title = "Keyphrase cloud";
  if (cloud.topic) title += " - " + *cloud.topic;
  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"pt\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>" + escape_xml(title) + "</title>\n";
  out += "<style>body{font-family:sans-serif;margin:1em}svg{border:1px solid #ccc}"
         "text{font-family:sans-serif}.meta{color:#666;font-size:0.9em}</style>\n";
  out += "</head>\n<body>\n<h1>" + escape_xml(title) + "</h1>\n";
  out += "<p class=\"meta\">generated " + format_rfc3339(cloud.generated_at) + ", " +
         std::to_string(cloud.entries.size()) + " entries</p>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";

  if (cloud.entries.empty()) {
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(kHeight / 2) +
           "\" text-anchor=\"middle\" font-size=\"" + fmt(cfg.min_font) + "\" fill=\"#888\">no entries</text>\n";
  } else {
    std::size_t cmin = cloud.entries.front().count;
    std::size_t cmax = cmin;
    for (const auto& e : cloud.entries) {
      cmin = std::min(cmin, e.count);
      cmax = std::max(cmax, e.count);
    }
    static constexpr const char* palette[] = {"#1f4e79", "#2e75b6", "#c55a11", "#548235", "#7030a0", "#bf9000"};
    std::vector<Box> placed;
    for (std::size_t i = 0; i < cloud.entries.size(); ++i) {
      const auto& e = cloud.entries[i];
      const std::string label = e.phrase + " (" + std::to_string(e.count) + ")";
      const double size = font_size(e.count, cmin, cmax, cfg);
      const double w = 0.58 * size * static_cast<double>(utf8::length(label));
      const double h = 1.15 * size;
      double cx = kWidth / 2;
      double cy = kHeight / 2;
      // Archimedean spiral from the centre; first free position wins.
      for (int step = 0; step < 4000; ++step) {
        const double t = 0.1 * step;
        const double px = kWidth / 2 + 4.0 * t * std::cos(t);
        const double py = kHeight / 2 + 2.5 * t * std::sin(t);
        const Box b{px - w / 2, py - h / 2, px + w / 2, py + h / 2};
        const bool free = std::none_of(placed.begin(), placed.end(), [&](const Box& o) { return o.overlaps(b); });
        if (free) {
          cx = px;
          cy = py;
          break;
        }
      }
      placed.push_back({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2});
      out += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(cy + size * 0.35) + "\" text-anchor=\"middle\" font-size=\"" +
             fmt(size) + "\" fill=\"" + palette[i % std::size(palette)] + "\" data-docs=\"";
      for (std::size_t d = 0; d < e.doc_ids.size(); ++d) {
        if (d > 0) out += ' ';
        out += escape_xml(e.doc_ids[d]);
      }
      out += "\">" + escape_xml(label) + "</text>\n";
    }
  }
  out += "</svg>\n";
  if (cloud.entries.empty()) out += "<p class=\"empty\">no entries</p>\n";
  out += "</body>\n</html>\n";
  return out;
}

void render_cloud(const TagCloud& cloud, const std::string& path, const CloudConfig& cfg) {
  const auto html = render_cloud_html(cloud, cfg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << html;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string cloud_to_json(const TagCloud& cloud) {
  using nlohmann::ordered_json;
  ordered_json entries = ordered_json::array();
  for (const auto& e : cloud.entries) {
    entries.push_back({{"phrase", e.phrase}, {"count", e.count}, {"doc_ids", e.doc_ids}});
  }
  ordered_json j;
  j["generated_at"] = format_rfc3339(cloud.generated_at);
  j["topic"] = cloud.topic ? ordered_json(*cloud.topic) : ordered_json(nullptr);
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

}  // namespace kpcloud
