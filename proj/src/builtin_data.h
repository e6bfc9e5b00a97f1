#pragma once

#include <string_view>

namespace kpcloud::builtin_data {

struct Profile {
  std::string_view stopwords;
  std::string_view ne_lexicon;
  std::string_view pos_lexicon;
};

// Contents of data/<lang>/ embedded at build time.
Profile profile(std::string_view lang);

}  // namespace kpcloud::builtin_data
