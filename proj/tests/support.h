#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "kpcloud/corpus.h"
#include "kpcloud/preprocess.h"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(KPCLOUD_TEST_DATA) + "/" + name; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() / ("kpcloud-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline const kpcloud::LanguageResources& pt() {
  static const auto res = kpcloud::LanguageResources::builtin(kpcloud::Language::Portuguese);
  return res;
}

inline kpcloud::NewsDocument make_doc(const std::string& id, const std::string& text,
                                      std::optional<std::vector<std::string>> gold = std::nullopt,
                                      const kpcloud::LanguageResources& res = pt()) {
  kpcloud::NewsDocument d;
  d.id = id;
  d.channel = "RTP1";
  d.program = "Telejornal";
  d.broadcast_time = kpcloud::parse_rfc3339("2011-05-03T20:00:00Z");
  d.text = text;
  d.tokens = kpcloud::tokenize(text, res);
  d.gold_keyphrases = std::move(gold);
  return d;
}

}  // namespace testing
