#include <doctest.h>

#include <regex>

#include "json.hpp"
#include "kpcloud/cloud.h"
#include "kpcloud/errors.h"
#include "support.h"

using namespace kpcloud;
using namespace std::chrono_literals;
using testing::pt;

namespace {

const Timestamp kNow = parse_rfc3339("2011-05-03T21:00:00Z");

struct Fixture {
  std::vector<NewsDocument> docs;
  std::vector<NewsItem> items;

  NewsDocument& add(const std::string& id, Timestamp t, std::size_t position = 0, const std::string& channel = "RTP1",
                    std::optional<std::string> topic = std::nullopt) {
    auto d = testing::make_doc(id, "texto");
    d.channel = channel;
    d.program = "Telejornal";
    d.broadcast_time = t;
    d.position_in_program = position;
    d.topic = std::move(topic);
    docs.push_back(std::move(d));
    return docs.back();
  }

  // Call after every add(): items point into docs.
  void finish(const std::vector<std::vector<std::string>>& phrases) {
    items.clear();
    for (std::size_t i = 0; i < docs.size(); ++i) {
      NewsItem it{&docs[i], {}};
      for (const auto& p : phrases[i]) {
        RankedKeyphrase k;
        k.surface = p;
        k.normalized = normalize_phrase(p, pt());
        k.tf = 1;
        k.rank = it.keyphrases.size() + 1;
        it.keyphrases.push_back(k);
      }
      items.push_back(std::move(it));
    }
  }
};

std::vector<std::string> distinct(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(100 + i));
  return out;
}

std::vector<std::string> ids(const std::vector<ScoredNews>& s) {
  std::vector<std::string> out;
  for (const auto& n : s) out.push_back(n.item->doc->id);
  return out;
}

std::vector<double> font_sizes(const std::string& html) {
  std::vector<double> out;
  const std::regex re("<text [^>]*font-size=\"([0-9.]+)\"[^>]*data-docs");
  for (auto it = std::sregex_iterator(html.begin(), html.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stod((*it)[1]));
  }
  return out;
}

}  // namespace

TEST_CASE("default configuration") {
  const CloudConfig c;
  CHECK(c.window_hours == 6.0);
  CHECK(c.top_news == 10);
  CHECK(c.keyphrases_per_news == 10);
  CHECK(c.cloud_size == 20);
  CHECK(c.weights.recency + c.weights.position + c.weights.duplication == doctest::Approx(1.0));
  CHECK_NOTHROW(c.validate());
  CloudConfig bad;
  bad.weights.recency = 0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = {};
  bad.weights = {1.2, -0.1, -0.1};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = {};
  bad.window_hours = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = {};
  bad.cloud_size = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("window boundaries") {
  CHECK(in_window(kNow - 6h, kNow, 6));
  CHECK_FALSE(in_window(kNow - 6h - 1s, kNow, 6));
  CHECK(in_window(kNow - 6h + 1s, kNow, 6));
  CHECK(in_window(kNow, kNow, 6));
  CHECK_FALSE(in_window(kNow + 1s, kNow, 6));
}

TEST_CASE("newer story wins a score tie") {
  Fixture f;
  f.add("old", kNow - 2h);
  f.add("new", kNow - 1h);
  f.finish({distinct("a", 3), distinct("b", 3)});
  CloudConfig cfg;
  cfg.weights = {0.0, 0.5, 0.5};
  const auto top = select_top_news(f.items, kNow, cfg);
  REQUIRE(top.size() == 2);
  CHECK(top[0].score == top[1].score);
  CHECK(ids(top) == std::vector<std::string>{"new", "old"});
}

TEST_CASE("earlier position in the program ranks higher") {
  Fixture f;
  f.add("late", kNow - 1h, 5);
  f.add("lead", kNow - 1h, 0);
  f.finish({distinct("a", 3), distinct("b", 3)});
  const auto top = select_top_news(f.items, kNow, {});
  CHECK(ids(top) == std::vector<std::string>{"lead", "late"});
  CHECK(top[0].position == 1.0);
  CHECK(top[1].position == 0.0);
}

TEST_CASE("a story carried by three channels beats a unique one") {
  Fixture f;
  f.add("unique", kNow - 1h, 0, "RTP1");
  f.add("dup-sic", kNow - 1h, 0, "SIC");
  f.add("dup-tvi", kNow - 1h, 0, "TVI");
  f.add("dup-rtpn", kNow - 1h, 0, "RTPN");
  const std::vector<std::string> story = {"Sócrates", "FMI", "resgate", "Lisboa"};
  f.finish({{"futebol", "Benfica", "Porto", "taça"}, story, story, story});
  const auto top = select_top_news(f.items, kNow, {});
  REQUIRE(top.size() == 4);
  CHECK(top.back().item->doc->id == "unique");
  CHECK(top.back().duplicates == 0);
  CHECK(top.front().duplicates == 2);
  CHECK(top.front().duplication == 1.0);
  CHECK(top.front().score - top.back().score == doctest::Approx(0.3));
}

TEST_CASE("selection keeps exactly top_news in-window stories") {
  Fixture f;
  std::vector<std::vector<std::string>> phrases;
  for (int i = 0; i < 14; ++i) {
    f.add("d" + std::to_string(i), kNow - std::chrono::minutes(25 * i), i % 4);
    phrases.push_back(distinct("p" + std::to_string(i), 3));
  }
  f.add("stale", kNow - 7h);
  phrases.push_back(distinct("s", 3));
  f.finish(phrases);
  const auto top = select_top_news(f.items, kNow, {});
  CHECK(top.size() == 10);
  for (const auto& s : top) CHECK(in_window(s.item->doc->broadcast_time, kNow, 6));
  for (std::size_t i = 1; i < top.size(); ++i) CHECK(top[i - 1].score >= top[i].score);
  CloudConfig few;
  few.window_hours = 1;
  CHECK(select_top_news(f.items, kNow, few).size() == 3);
  CHECK(select_top_news(std::span<const NewsItem>{}, kNow, {}).empty());
}

TEST_CASE("ten stories of ten distinct keyphrases give twenty single-count entries") {
  Fixture f;
  std::vector<std::vector<std::string>> phrases;
  for (int i = 0; i < 10; ++i) {
    f.add("d" + std::to_string(i), kNow - std::chrono::minutes(10 * i));
    phrases.push_back(distinct("w" + std::string(1, char('a' + i)), 10));
  }
  f.finish(phrases);
  const auto cloud = build_cloud(std::span<const NewsItem>(f.items), {}, kNow);
  REQUIRE(cloud.entries.size() == 20);
  for (std::size_t i = 0; i < cloud.entries.size(); ++i) {
    CHECK(cloud.entries[i].count == 1);
    if (i > 0) CHECK(cloud.entries[i - 1].phrase < cloud.entries[i].phrase);
  }
  CHECK(cloud.entries.size() <= 2 * f.items.size());
}

TEST_CASE("a phrase in every story tops the cloud") {
  Fixture f;
  std::vector<std::vector<std::string>> phrases;
  for (int i = 0; i < 10; ++i) {
    f.add("d" + std::to_string(i), kNow - std::chrono::minutes(10 * i));
    auto p = distinct("w" + std::string(1, char('a' + i)), 9);
    p.insert(p.begin() + i % 9, "Governo");
    phrases.push_back(p);
  }
  f.finish(phrases);
  auto& extra = f.items[0].keyphrases;
  extra[0].tf = 3;  // counts are summed per mention
  const auto cloud = build_cloud(std::span<const NewsItem>(f.items), {}, kNow);
  REQUIRE_FALSE(cloud.entries.empty());
  CHECK(cloud.entries[0].phrase == "Governo");
  CHECK(cloud.entries[0].count >= 10);
  CHECK(cloud.entries[0].doc_ids.size() == 10);
  CHECK(std::is_sorted(cloud.entries[0].doc_ids.begin(), cloud.entries[0].doc_ids.end()));
  for (std::size_t i = 1; i < cloud.entries.size(); ++i) CHECK(cloud.entries[i - 1].count >= cloud.entries[i].count);
}

TEST_CASE("topic filter restricts contributing stories") {
  Fixture f;
  f.add("eco", kNow - 1h, 0, "RTP1", "economia");
  f.add("des", kNow - 1h, 1, "RTP1", "desporto");
  f.add("none", kNow - 1h, 2, "RTP1");
  f.finish({{"défice", "FMI"}, {"Benfica"}, {"chuva"}});
  CloudConfig cfg;
  cfg.topic_filter = "economia";
  const auto top = select_top_news(f.items, kNow, cfg);
  CHECK(ids(top) == std::vector<std::string>{"eco"});
  const auto cloud = build_cloud(std::span<const NewsItem>(f.items), cfg, kNow);
  REQUIRE(cloud.entries.size() == 2);
  for (const auto& e : cloud.entries) CHECK(e.doc_ids == std::vector<std::string>{"eco"});
  CHECK(cloud.topic == std::optional<std::string>("economia"));
}

TEST_CASE("font scale endpoints") {
  const CloudConfig cfg;
  CHECK(font_size(10, 1, 10, cfg) == cfg.max_font);
  CHECK(font_size(1, 1, 10, cfg) == cfg.min_font);
  CHECK(font_size(4, 4, 4, cfg) == cfg.max_font);
  CHECK(font_size(5, 1, 9, cfg) == doctest::Approx((cfg.min_font + cfg.max_font) / 2));
}

TEST_CASE("rendering") {
  const CloudConfig cfg;
  TagCloud empty;
  empty.generated_at = kNow;
  const auto e = render_cloud_html(empty, cfg);
  CHECK(e.find("<svg") != std::string::npos);
  CHECK(e.find("no entries") != std::string::npos);

  TagCloud two;
  two.generated_at = kNow;
  two.entries = {{"Governo", "govern", 10, {"a"}}, {"FMI & BCE", "fmi & bce", 1, {"b"}}};
  const auto html = render_cloud_html(two, cfg);
  CHECK(html.find("Governo (10)") != std::string::npos);
  CHECK(html.find("FMI &amp; BCE (1)") != std::string::npos);
  CHECK(html.find("src=") == std::string::npos);
  CHECK(html.find("href=") == std::string::npos);
  CHECK(font_sizes(html) == std::vector<double>{cfg.max_font, cfg.min_font});
  CHECK(render_cloud_html(two, cfg) == html);

  testing::TempDir dir("render");
  render_cloud(two, dir.file("a.html"), cfg);
  render_cloud(two, dir.file("b.html"), cfg);
  const auto read = [](const std::string& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(read(dir.file("a.html")) == read(dir.file("b.html")));
  CHECK(read(dir.file("a.html")) == html);
  CHECK_THROWS_AS(render_cloud(two, "/nonexistent/dir/c.html", cfg), IoError);
}

TEST_CASE("cloud JSON export") {
  TagCloud c;
  c.generated_at = kNow;
  c.topic = "economia";
  c.entries = {{"FMI", "fmi", 3, {"a", "b"}}};
  const auto j = nlohmann::json::parse(cloud_to_json(c));
  CHECK(j["generated_at"] == "2011-05-03T21:00:00Z");
  CHECK(j["topic"] == "economia");
  CHECK(j["entries"][0]["phrase"] == "FMI");
  CHECK(j["entries"][0]["count"] == 3);
  CHECK(j["entries"][0]["doc_ids"].size() == 2);
  c.topic.reset();
  CHECK(nlohmann::json::parse(cloud_to_json(c))["topic"].is_null());
}

TEST_CASE("same inputs give the same cloud") {
  Fixture f;
  std::vector<std::vector<std::string>> phrases;
  for (int i = 0; i < 12; ++i) {
    f.add("d" + std::to_string(i), kNow - std::chrono::minutes(20 * i), i % 3, i % 2 ? "SIC" : "TVI");
    phrases.push_back({"Governo", "x" + std::to_string(i % 4), "y" + std::to_string(i % 5), "z" + std::to_string(i)});
  }
  f.finish(phrases);
  const auto run = [&] {
    const auto top = select_top_news(f.items, kNow, {});
    return cloud_to_json(build_cloud(std::span<const ScoredNews>(top), {}, kNow));
  };
  CHECK(run() == run());
}
