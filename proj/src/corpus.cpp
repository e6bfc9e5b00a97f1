#include "kpcloud/corpus.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "kpcloud/errors.h"

namespace kpcloud {

using nlohmann::json;

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t n) {
  if (pos + n > text.size()) throw ParseError("truncated timestamp '" + std::string(text) + "'");
  int value = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') throw ParseError("invalid timestamp '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos)
    throw ParseError("invalid timestamp '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const int y = parse_digits(text, 0, 4);
  expect_char(text, 4, "-");
  const int mo = parse_digits(text, 5, 2);
  expect_char(text, 7, "-");
  const int d = parse_digits(text, 8, 2);
  expect_char(text, 10, "Tt ");
  const int h = parse_digits(text, 11, 2);
  expect_char(text, 13, ":");
  const int mi = parse_digits(text, 14, 2);
  expect_char(text, 16, ":");
  const int s = parse_digits(text, 17, 2);
  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) millis = millis * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw ParseError("invalid timestamp '" + std::string(text) + "'");
    for (; digits < 3; ++digits) millis *= 10;
  }
  int offset_minutes = 0;
  expect_char(text, pos, "Zz+-");
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = parse_digits(text, pos + 1, 2);
    expect_char(text, pos + 3, ":");
    const int om = parse_digits(text, pos + 4, 2);
    if (oh > 23 || om > 59) throw ParseError("invalid timestamp offset '" + std::string(text) + "'");
    offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  }
  if (pos != text.size()) throw ParseError("trailing characters in timestamp '" + std::string(text) + "'");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60)
    throw ParseError("out-of-range timestamp '" + std::string(text) + "'");
  return time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{s} +
         milliseconds{millis} - minutes{offset_minutes};
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[40];
  const auto ms = tod.subseconds().count();
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()), static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()), static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()), static_cast<long long>(ms));
  }
  return buf;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train:
      return "train";
    case Split::Test:
      return "test";
    case Split::Unlabeled:
      return "unlabeled";
  }
  return "unlabeled";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  if (name == "unlabeled") return Split::Unlabeled;
  throw ValidationError("unknown split '" + std::string(name) + "'");
}

void validate_corpus(const Corpus& corpus) {
  std::unordered_set<std::string> ids;
  for (const auto& doc : corpus.documents) {
    if (doc.id.empty()) throw ValidationError("document with empty id");
    if (!ids.insert(doc.id).second) throw ValidationError("duplicate document id '" + doc.id + "'");
    if (corpus.split != Split::Unlabeled && !doc.gold_keyphrases) {
      throw ValidationError("document '" + doc.id + "' has no gold_keyphrases (required for " +
                            std::string(to_string(corpus.split)) + " split)");
    }
    if (!doc.gold_keyphrases) continue;
    for (const auto& kp : *doc.gold_keyphrases) {
      const auto n = tokenize(kp).size();
      if (n == 0 || n > kMaxKeyphraseWords) {
        throw ValidationError("document '" + doc.id + "': gold keyphrase '" + kp + "' has " + std::to_string(n) +
                              " words (allowed 1.." + std::to_string(kMaxKeyphraseWords) + ")");
      }
    }
  }
}

namespace {

std::string line_context(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

NewsDocument document_from_json(const json& obj, std::size_t index, const LanguageResources& resources,
                                const std::string& source) {
  const std::string where = source + ": document " + std::to_string(index);
  if (!obj.is_object()) throw ValidationError(where + " is not an object");
  NewsDocument doc;
  doc.id = required<std::string>(obj, "id", where);
  const std::string named = source + ": document '" + doc.id + "'";
  doc.channel = required<std::string>(obj, "channel", named);
  doc.program = required<std::string>(obj, "program", named);
  try {
    doc.broadcast_time = parse_rfc3339(required<std::string>(obj, "broadcast_time", named));
  } catch (const ParseError& e) {
    throw ValidationError(named + ": " + e.what());
  }
  const auto position = required<long long>(obj, "position_in_program", named);
  if (position < 0) throw ValidationError(named + ": position_in_program must be >= 0");
  doc.position_in_program = static_cast<std::size_t>(position);
  if (const auto it = obj.find("topic"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError(named + ": field 'topic' has the wrong type");
    doc.topic = it->get<std::string>();
  }
  doc.text = required<std::string>(obj, "text", named);
  if (const auto it = obj.find("gold_keyphrases"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw ValidationError(named + ": field 'gold_keyphrases' must be an array");
    std::vector<std::string> gold;
    for (const auto& kp : *it) {
      if (!kp.is_string()) throw ValidationError(named + ": gold keyphrases must be strings");
      gold.push_back(kp.get<std::string>());
    }
    doc.gold_keyphrases = std::move(gold);
  }
  doc.tokens = tokenize(doc.text, resources);
  return doc;
}

}  // namespace

Corpus parse_corpus(std::string_view json_text, Split split, const LanguageResources& resources,
                    const std::string& source) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(source + ":" + line_context(json_text, e.byte) + ": " + e.what());
  }
  Corpus corpus;
  corpus.split = split;
  if (root.is_object() && root.contains("documents")) {
    const auto& docs = root["documents"];
    if (!docs.is_array()) throw ValidationError(source + ": 'documents' must be an array");
    corpus.documents.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
      corpus.documents.push_back(document_from_json(docs[i], i, resources, source));
  } else if (root.is_object() && root.contains("id")) {
    corpus.documents.push_back(document_from_json(root, 0, resources, source));
  } else {
    throw ValidationError(source + ": expected {\"documents\": [...]} or a single document object");
  }
  validate_corpus(corpus);
  return corpus;
}

Corpus load_corpus(const std::string& path, Split split, const LanguageResources& resources) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), split, resources, path);
}

std::string serialize_corpus(const Corpus& corpus) {
  json docs = json::array();
  for (const auto& doc : corpus.documents) {
    json obj = {{"id", doc.id},
                {"channel", doc.channel},
                {"program", doc.program},
                {"broadcast_time", format_rfc3339(doc.broadcast_time)},
                {"position_in_program", doc.position_in_program}};
    if (doc.topic) obj["topic"] = *doc.topic;
    obj["text"] = doc.text;
    if (doc.gold_keyphrases) obj["gold_keyphrases"] = *doc.gold_keyphrases;
    docs.push_back(std::move(obj));
  }
  return json{{"documents", std::move(docs)}}.dump(1) + "\n";
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << serialize_corpus(corpus);
  if (!out) throw IoError("write to '" + path + "' failed");
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.documents = corpus.documents.size();
  std::size_t gold = 0;
  for (const auto& doc : corpus.documents) {
    stats.total_words += doc.word_count();
    if (doc.gold_keyphrases) gold += doc.gold_keyphrases->size();
  }
  if (stats.documents > 0) stats.mean_gold_keyphrases = static_cast<double>(gold) / stats.documents;
  return stats;
}

}  // namespace kpcloud
