#include "kpcloud/preprocess.h"

#include <fstream>
#include <cctype>
#include <sstream>

#include "builtin_data.h"
#include "kpcloud/errors.h"
#include "kpcloud/utf8.h"

namespace kpcloud {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Portuguese:
      return "pt";
    case Language::English:
      return "en";
  }
  return "pt";
}

Language parse_language(std::string_view name) {
  if (name == "pt" || name == "portuguese") return Language::Portuguese;
  if (name == "en" || name == "english") return Language::English;
  throw ValidationError("unknown language profile '" + std::string(name) + "' (expected pt or en)");
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = pos;
    const char32_t cp = utf8::decode(text, next);
    if (utf8::is_space(cp)) {
      if (utf8::is_line_break(cp) && !tokens.empty()) tokens.back().sentence_boundary_after = true;
      pos = next;
      continue;
    }

    std::size_t chunk_end = pos;
    while (chunk_end < text.size()) {
      std::size_t q = chunk_end;
      if (utf8::is_space(utf8::decode(text, q))) break;
      chunk_end = q;
    }

    std::size_t core_begin = pos;
    bool leading_terminator = false;
    while (core_begin < chunk_end) {
      std::size_t q = core_begin;
      const char32_t c = utf8::decode(text, q);
      if (!utf8::is_punct(c)) break;
      leading_terminator = leading_terminator || utf8::is_sentence_terminator(c);
      core_begin = q;
    }
    if (leading_terminator && !tokens.empty()) tokens.back().sentence_boundary_after = true;

    std::size_t core_end = core_begin;
    bool trailing_terminator = false;
    for (std::size_t q = core_begin; q < chunk_end;) {
      const char32_t c = utf8::decode(text, q);
      if (utf8::is_punct(c)) {
        trailing_terminator = trailing_terminator || utf8::is_sentence_terminator(c);
      } else {
        core_end = q;
        trailing_terminator = false;
      }
    }

    if (core_end > core_begin) {
      Token tok;
      tok.surface = std::string(text.substr(core_begin, core_end - core_begin));
      tok.lower = utf8::fold_case(tok.surface);
      tok.char_offset = core_begin;
      tok.sentence_boundary_after = trailing_terminator;
      tokens.push_back(std::move(tok));
    }
    pos = chunk_end;
  }
  return tokens;
}

void annotate(std::vector<Token>& tokens, const LanguageResources& resources) {
  for (auto& tok : tokens) {
    tok.stem = stem(tok.lower, resources);
    tok.is_stopword = resources.stopwords.contains(tok.lower);
  }
}

std::vector<Token> tokenize(std::string_view text, const LanguageResources& resources) {
  auto tokens = tokenize(text);
  annotate(tokens, resources);
  return tokens;
}

std::string stem(std::string_view word, const LanguageResources& resources) {
  std::string current = utf8::fold_case(word);
  if (!resources.stemmer || !utf8::has_letter(current)) return current;
  // Each pass only shortens the word or removes accents, so this converges.
  for (int pass = 0; pass < 16; ++pass) {
    std::string next = resources.stemmer->apply_rules(current);
    if (next.empty() || next == current) break;
    current = std::move(next);
  }
  return current;
}

bool is_stopword(std::string_view word, const LanguageResources& resources) {
  return resources.stopwords.contains(utf8::fold_case(word));
}

std::string normalize_phrase(std::string_view phrase, const LanguageResources& resources) {
  std::string out;
  for (const auto& tok : tokenize(phrase)) {
    if (!out.empty()) out.push_back(' ');
    out += stem(tok.lower, resources);
  }
  return out;
}

PosTag parse_pos_tag(std::string_view tag) {
  std::string t;
  for (const char c : tag) t.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (t == "N" || t == "NOUN" || t == "NC" || t == "NP" || t == "PROPN" || t == "SUBST") return PosTag::Noun;
  if (t == "V" || t == "VERB" || t == "VB" || t == "AUX") return PosTag::Verb;
  if (t == "ADJ" || t == "A" || t == "JJ") return PosTag::Adjective;
  if (t == "ADV" || t == "RB") return PosTag::Adverb;
  return PosTag::Other;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename F>
void for_each_line(std::string_view content, F&& f) {
  std::size_t line_no = 0;
  while (!content.empty()) {
    ++line_no;
    const auto nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
    f(line, line_no);
  }
}

}  // namespace

std::unordered_set<std::string> parse_word_list(std::string_view content) {
  std::unordered_set<std::string> words;
  for_each_line(content, [&](std::string_view line, std::size_t) {
    line = trim(line);
    if (line.empty() || line.front() == '#') return;
    words.insert(utf8::fold_case(line));
  });
  return words;
}

std::unordered_set<std::string> load_word_list(const std::string& path) {
  return parse_word_list(read_text_file(path));
}

std::unordered_map<std::string, std::string> parse_tag_lexicon(std::string_view content,
                                                              const std::string& source) {
  std::unordered_map<std::string, std::string> lexicon;
  for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    if (trim(line).empty() || trim(line).front() == '#') return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected word<TAB>tag");
    }
    const auto word = trim(line.substr(0, tab));
    const auto tag = trim(line.substr(tab + 1));
    if (word.empty() || tag.empty()) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": empty word or tag");
    }
    lexicon.emplace(utf8::fold_case(word), std::string(tag));
  });
  return lexicon;
}

std::unordered_map<std::string, std::string> load_tag_lexicon(const std::string& path) {
  return parse_tag_lexicon(read_text_file(path), path);
}

namespace {

std::unordered_set<std::string> keys_of(const std::unordered_map<std::string, std::string>& lexicon) {
  std::unordered_set<std::string> keys;
  for (const auto& [word, tag] : lexicon) keys.insert(word);
  return keys;
}

std::unordered_map<std::string, PosTag> pos_map(const std::unordered_map<std::string, std::string>& lexicon) {
  std::unordered_map<std::string, PosTag> out;
  for (const auto& [word, tag] : lexicon) out.emplace(word, parse_pos_tag(tag));
  return out;
}

}  // namespace

LanguageResources LanguageResources::builtin(Language lang) {
  LanguageResources res;
  res.language = lang;
  const auto data = builtin_data::profile(to_string(lang));
  res.stopwords = parse_word_list(data.stopwords);
  res.ne_lexicon = keys_of(parse_tag_lexicon(data.ne_lexicon, "builtin ne_lexicon"));
  res.pos_lexicon = pos_map(parse_tag_lexicon(data.pos_lexicon, "builtin pos_lexicon"));
  res.stemmer = lang == Language::English ? make_porter_stemmer() : make_portuguese_stemmer();
  if (res.stopwords.empty()) throw ValidationError("builtin stopword list is empty");
  return res;
}

LanguageResources LanguageResources::load(Language lang, const std::string& stopwords_path,
                                          const std::string& ne_lexicon_path,
                                          const std::string& pos_lexicon_path) {
  auto res = builtin(lang);
  if (!stopwords_path.empty()) {
    res.stopwords = load_word_list(stopwords_path);
    if (res.stopwords.empty()) throw ValidationError("stopword list '" + stopwords_path + "' is empty");
  }
  if (!ne_lexicon_path.empty()) res.ne_lexicon = keys_of(load_tag_lexicon(ne_lexicon_path));
  if (!pos_lexicon_path.empty()) res.pos_lexicon = pos_map(load_tag_lexicon(pos_lexicon_path));
  return res;
}

}  // namespace kpcloud
