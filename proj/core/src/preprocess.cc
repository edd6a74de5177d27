#include "pds/preprocess.h"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "pds/errors.h"
#include "pds/stemmer.h"

namespace pds {
namespace {

bool is_word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '\'' || c == '-' || u >= 0x80;
}

// Runs of word characters with their byte offsets.
struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> word_spans(std::string_view text) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    spans.push_back({i, j});
    i = j;
  }
  return spans;
}

// Drops edge apostrophes and hyphens and a possessive "'s".
std::string clean_word(std::string_view raw) {
  std::string w = to_lower(raw);
  if (w.size() > 2 && w.ends_with("'s")) w.resize(w.size() - 2);
  auto edge = [](char c) { return c == '\'' || c == '-'; };
  std::size_t b = 0;
  std::size_t e = w.size();
  while (b < e && edge(w[b])) ++b;
  while (e > b && edge(w[e - 1])) --e;
  return w.substr(b, e - b);
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  for (const auto &s : word_spans(text)) {
    std::string w = clean_word(text.substr(s.begin, s.end - s.begin));
    if (!w.empty()) words.push_back(std::move(w));
  }
  return words;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::ifstream open_or_throw(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

bool is_numeric(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string stem_phrase(std::string_view phrase) {
  std::string out;
  std::size_t i = 0;
  while (i < phrase.size()) {
    while (i < phrase.size() && phrase[i] == ' ') ++i;
    std::size_t j = i;
    while (j < phrase.size() && phrase[j] != ' ') ++j;
    if (j > i) {
      if (!out.empty()) out += ' ';
      out += stem(to_lower(phrase.substr(i, j - i)));
    }
    i = j;
  }
  return out;
}

std::vector<std::string> split_clauses(std::string_view text) {
  std::vector<std::string> clauses;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || std::string_view(".!?;,\n").find(text[i]) != std::string_view::npos) {
      std::string piece = trim(text.substr(start, i - start));
      if (!piece.empty()) clauses.push_back(std::move(piece));
      start = i + 1;
    }
  }
  return clauses;
}

// --- SlangDictionary ----------------------------------------------------------

SlangDictionary::SlangDictionary(std::unordered_map<std::string, std::string> entries) {
  for (auto &[form, replacement] : entries) map_.emplace(to_lower(form), to_lower(replacement));
}

SlangDictionary SlangDictionary::load(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  std::unordered_map<std::string, std::string> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected form<TAB>replacement");
    }
    entries.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return SlangDictionary(std::move(entries));
}

std::string SlangDictionary::normalize(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  std::size_t cursor = 0;
  for (const auto &s : word_spans(text)) {
    out.append(text.substr(cursor, s.begin - cursor));
    std::string_view word = text.substr(s.begin, s.end - s.begin);
    auto it = map_.find(to_lower(word));
    if (it != map_.end()) {
      out += it->second;
    } else {
      out.append(word);
    }
    cursor = s.end;
  }
  out.append(text.substr(cursor));
  return out;
}

// --- StopList -----------------------------------------------------------------

StopList::StopList(std::unordered_set<std::string> words) {
  for (const auto &w : words) words_.insert(to_lower(w));
}

StopList StopList::load(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = trim(line);
    if (w.empty() || w[0] == '#') continue;
    words.insert(std::move(w));
  }
  return StopList(std::move(words));
}

bool StopList::contains(std::string_view word) const { return words_.contains(to_lower(word)); }

// --- PhraseDictionary ---------------------------------------------------------

PhraseDictionary::PhraseDictionary(const std::vector<std::string> &phrases) {
  for (const auto &p : phrases) {
    std::vector<std::string> stems;
    for (const auto &w : split_words(p)) stems.push_back(stem(w));
    if (stems.size() >= 2) entries_.push_back(std::move(stems));
  }
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
}

PhraseDictionary PhraseDictionary::load(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    std::string p = trim(line);
    if (p.empty() || p[0] == '#') continue;
    phrases.push_back(std::move(p));
  }
  return PhraseDictionary(phrases);
}

std::size_t PhraseDictionary::match(std::span<const std::string> stems, std::size_t begin) const {
  std::size_t best = 0;
  for (const auto &entry : entries_) {
    if (entry.size() <= best || begin + entry.size() > stems.size()) continue;
    if (std::equal(entry.begin(), entry.end(), stems.begin() + static_cast<std::ptrdiff_t>(begin))) {
      best = entry.size();
    }
  }
  return best;
}

// --- Preprocessor -------------------------------------------------------------

Preprocessor::Preprocessor(SlangDictionary slang, StopList stops, PhraseDictionary phrases)
    : slang_(std::move(slang)), stops_(std::move(stops)), phrases_(std::move(phrases)) {}

Preprocessor Preprocessor::load(const std::filesystem::path &dir) {
  return Preprocessor(SlangDictionary::load(dir / "slang.tsv"), StopList::load(dir / "stopwords.txt"),
                      PhraseDictionary::load(dir / "phrases.txt"));
}

std::string Preprocessor::normalize_slang(std::string_view text) const { return slang_.normalize(text); }

std::vector<Token> Preprocessor::tokenize(std::string_view text) const {
  std::vector<std::string> words = split_words(text);
  std::vector<std::string> stems;
  stems.reserve(words.size());
  for (const auto &w : words) stems.push_back(stem(w));

  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t len = phrases_.match(stems, i);
    if (len == 0) len = 1;
    std::string surface = words[i];
    for (std::size_t k = 1; k < len; ++k) surface += ' ' + words[i + k];
    tokens.push_back({std::move(surface), tokens.size()});
    i += len;
  }
  return tokens;
}

std::vector<Token> Preprocessor::remove_stop_words(std::span<const Token> tokens) const {
  std::vector<Token> kept;
  for (const auto &t : tokens) {
    if (!stops_.contains(t.surface)) kept.push_back(t);
  }
  return kept;
}

std::vector<Keyword> Preprocessor::extract_keywords(const ChatMessage &msg) const {
  std::vector<Token> tokens = tokenize(normalize_slang(msg.text));
  std::vector<Keyword> out;
  for (auto &t : remove_stop_words(tokens)) {
    if (is_numeric(t.surface)) continue;
    std::string key = stem_phrase(t.surface);
    out.push_back({std::move(key), std::move(t.surface), ref_of(msg)});
  }
  return out;
}

std::string Preprocessor::canonical(std::string_view phrase) const {
  std::string out;
  for (const auto &w : split_words(normalize_slang(phrase))) {
    if (!out.empty()) out += ' ';
    out += stem(w);
  }
  return out;
}

}  // namespace pds
