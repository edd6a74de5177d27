#ifndef PDS_PREPROCESS_H_
#define PDS_PREPROCESS_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pds/message.h"

namespace pds {

struct Token {
  std::string surface;    // lowercase; phrase tokens keep one inner space
  std::size_t position = 0;  // index in the message's token sequence
};

// A filtered keyword headed for the filter-word store.
struct Keyword {
  std::string stem;     // stemmed, lowercase; a fixed point of stem()
  std::string surface;  // normalized text form, e.g. "favorite food"
  MessageRef source;
};

// Chat slang -> standard form, e.g. "ur" -> "your". File format is
// `form<TAB>replacement`, one entry per line.
class SlangDictionary {
 public:
  SlangDictionary() = default;
  explicit SlangDictionary(std::unordered_map<std::string, std::string> entries);
  static SlangDictionary load(const std::filesystem::path &path);

  // Replaces every whole-word hit, case-insensitively. Replacements are
  // emitted in lowercase; everything else is copied verbatim.
  std::string normalize(std::string_view text) const;

  const std::unordered_map<std::string, std::string> &entries() const { return map_; }

 private:
  std::unordered_map<std::string, std::string> map_;
};

class StopList {
 public:
  StopList() = default;
  explicit StopList(std::unordered_set<std::string> words);
  static StopList load(const std::filesystem::path &path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Multi-word keywords that tokenize as one token. Matching compares stems,
// so "kids name" joins as the entry "kid name".
class PhraseDictionary {
 public:
  PhraseDictionary() = default;
  explicit PhraseDictionary(const std::vector<std::string> &phrases);
  static PhraseDictionary load(const std::filesystem::path &path);

  // Length in words of the longest entry matching the stems at `begin`,
  // or 0 when nothing matches.
  std::size_t match(std::span<const std::string> stems, std::size_t begin) const;

 private:
  std::vector<std::vector<std::string>> entries_;  // stemmed words
};

class Preprocessor {
 public:
  Preprocessor() = default;
  Preprocessor(SlangDictionary slang, StopList stops, PhraseDictionary phrases);

  // Loads stopwords.txt, slang.tsv and phrases.txt from `dir`.
  static Preprocessor load(const std::filesystem::path &dir);

  std::string normalize_slang(std::string_view text) const;

  // Splits on whitespace and punctuation, lowercases, and joins dictionary
  // phrases into single tokens. Empty text gives an empty sequence.
  std::vector<Token> tokenize(std::string_view text) const;

  // Order-preserving filter; positions are kept from the input.
  std::vector<Token> remove_stop_words(std::span<const Token> tokens) const;

  // normalize -> tokenize -> stop removal -> stem. Numeric tokens are dropped.
  std::vector<Keyword> extract_keywords(const ChatMessage &msg) const;

  // Canonical match key for a keyword or lexicon term: slang-normalized,
  // lowercased, every word stemmed, single spaces.
  std::string canonical(std::string_view phrase) const;

  bool is_stop_word(std::string_view word) const { return stops_.contains(word); }

 private:
  SlangDictionary slang_;
  StopList stops_;
  PhraseDictionary phrases_;
};

// Stems each space-separated word of an already tokenized phrase.
std::string stem_phrase(std::string_view phrase);

// Splits text into clauses at . ! ? ; , and newlines. Pieces are trimmed;
// empty pieces are dropped.
std::vector<std::string> split_clauses(std::string_view text);

// ASCII lowercase; other bytes are copied unchanged.
std::string to_lower(std::string_view text);

}  // namespace pds

#endif  // PDS_PREPROCESS_H_
