#include "pds/chunker.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "pds/errors.h"
#include "pds/stemmer.h"

namespace pds {
namespace {

constexpr std::array<std::pair<PosTag, std::string_view>, 9> kTagNames{{
    {PosTag::kNoun, "NOUN"},
    {PosTag::kVerb, "VERB"},
    {PosTag::kAdj, "ADJ"},
    {PosTag::kAdv, "ADV"},
    {PosTag::kPrep, "PREP"},
    {PosTag::kDet, "DET"},
    {PosTag::kPron, "PRON"},
    {PosTag::kNum, "NUM"},
    {PosTag::kOther, "OTHER"},
}};

bool open_class(PosTag t) {
  return t == PosTag::kNoun || t == PosTag::kVerb || t == PosTag::kAdj || t == PosTag::kAdv;
}

bool all_digits(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == ',';
  }) && std::isdigit(static_cast<unsigned char>(w.front()));
}

// Recursive-descent chunker over a tag sequence. Each parse_* returns false
// and leaves pos_ untouched when no phrase starts at pos_.
class Chunker {
 public:
  explicit Chunker(std::span<const TaggedToken> toks) : toks_(toks) {}

  ParseNode run() {
    ParseNode s{PhraseLabel::kS, {}, std::nullopt};
    while (pos_ < toks_.size()) {
      ParseNode node;
      if (parse_np(node) || parse_vp(node) || parse_pp(node) || parse_adjp(node)) {
        s.children.push_back(std::move(node));
      } else {
        s.children.push_back(ParseNode::make_leaf(toks_[pos_++]));
      }
    }
    return s;
  }

 private:
  bool at(PosTag t, std::size_t i) const { return i < toks_.size() && toks_[i].tag == t; }

  ParseNode leaves(PhraseLabel label, std::size_t from, std::size_t to) const {
    ParseNode n{label, {}, std::nullopt};
    for (std::size_t i = from; i < to; ++i) n.children.push_back(ParseNode::make_leaf(toks_[i]));
    return n;
  }

  bool parse_np(ParseNode &out) {
    if (at(PosTag::kPron, pos_)) {
      out = leaves(PhraseLabel::kNP, pos_, pos_ + 1);
      ++pos_;
      return true;
    }
    std::size_t j = pos_;
    if (at(PosTag::kDet, j)) ++j;
    while (at(PosTag::kNum, j)) ++j;
    while (at(PosTag::kAdj, j)) ++j;
    if (!at(PosTag::kNoun, j)) return false;
    while (at(PosTag::kNoun, j)) ++j;
    out = leaves(PhraseLabel::kNP, pos_, j);
    pos_ = j;
    return true;
  }

  bool parse_adjp(ParseNode &out) {
    std::size_t j = pos_;
    while (at(PosTag::kAdv, j)) ++j;
    if (!at(PosTag::kAdj, j)) return false;
    while (at(PosTag::kAdj, j)) ++j;
    out = leaves(PhraseLabel::kADJP, pos_, j);
    pos_ = j;
    return true;
  }

  bool parse_pp(ParseNode &out) {
    if (!at(PosTag::kPrep, pos_)) return false;
    std::size_t saved = pos_++;
    ParseNode np;
    if (!parse_np(np)) {
      pos_ = saved;
      return false;
    }
    out = ParseNode{PhraseLabel::kPP, {}, std::nullopt};
    out.children.push_back(ParseNode::make_leaf(toks_[saved]));
    out.children.push_back(std::move(np));
    return true;
  }

  bool parse_vp(ParseNode &out) {
    if (!at(PosTag::kVerb, pos_)) return false;
    out = ParseNode{PhraseLabel::kVP, {}, std::nullopt};
    out.children.push_back(ParseNode::make_leaf(toks_[pos_++]));
    std::size_t j = pos_;
    while (at(PosTag::kAdv, j)) ++j;
    if (at(PosTag::kVerb, j)) {
      while (pos_ < j) out.children.push_back(ParseNode::make_leaf(toks_[pos_++]));
      ParseNode inner;
      parse_vp(inner);
      out.children.push_back(std::move(inner));
      return true;
    }
    for (;;) {
      ParseNode comp;
      if (parse_np(comp) || parse_pp(comp) || parse_adjp(comp)) {
        out.children.push_back(std::move(comp));
      } else {
        break;
      }
    }
    return true;
  }

  std::span<const TaggedToken> toks_;
  std::size_t pos_ = 0;
};

void collect_leaves(const ParseNode &n, std::vector<TaggedToken> &out) {
  if (n.is_leaf()) {
    out.push_back(*n.leaf);
    return;
  }
  for (const auto &c : n.children) collect_leaves(c, out);
}

void render(const ParseNode &n, std::string &out) {
  if (n.is_leaf()) {
    out += n.leaf->surface;
    return;
  }
  out += '(';
  out += to_string(n.label);
  for (const auto &c : n.children) {
    out += ' ';
    render(c, out);
  }
  out += ')';
}

}  // namespace

std::string_view to_string(PosTag tag) {
  for (const auto &[t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "OTHER";
}

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  for (const auto &[t, n] : kTagNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::string_view to_string(PhraseLabel label) {
  switch (label) {
    case PhraseLabel::kS:
      return "S";
    case PhraseLabel::kNP:
      return "NP";
    case PhraseLabel::kVP:
      return "VP";
    case PhraseLabel::kPP:
      return "PP";
    case PhraseLabel::kADJP:
      return "ADJP";
    case PhraseLabel::kLeaf:
      return "LEAF";
  }
  return "LEAF";
}

PosTagger::PosTagger(std::unordered_map<std::string, PosTag> lexicon) : lexicon_(std::move(lexicon)) {
  for (const auto &[word, tag] : lexicon_) {
    if (open_class(tag)) stem_lexicon_.emplace(stem(word), tag);
  }
}

PosTagger PosTagger::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::unordered_map<std::string, PosTag> lexicon;
  std::vector<std::pair<std::string, PosTag>> ordered;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    auto tag = tab == std::string::npos ? std::nullopt : parse_pos_tag(line.substr(tab + 1));
    if (!tag) throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected word<TAB>TAG");
    std::string word = to_lower(line.substr(0, tab));
    if (lexicon.emplace(word, *tag).second) ordered.emplace_back(word, *tag);
  }
  PosTagger tagger(std::move(lexicon));
  // Rebuild the stem table in file order so the first entry wins there too.
  tagger.stem_lexicon_.clear();
  for (const auto &[word, tag] : ordered) {
    if (open_class(tag)) tagger.stem_lexicon_.emplace(stem(word), tag);
  }
  return tagger;
}

PosTag PosTagger::tag_word(std::string_view word) const {
  std::string w = to_lower(word);
  if (w.find(' ') != std::string::npos) return PosTag::kNoun;  // joined phrase
  if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
  if (all_digits(w)) return PosTag::kNum;
  if (auto it = stem_lexicon_.find(stem(w)); it != stem_lexicon_.end()) return it->second;
  if (w.size() > 4 && w.ends_with("ly")) return PosTag::kAdv;
  if (w.size() > 4 && (w.ends_with("ed") || w.ends_with("ing"))) return PosTag::kVerb;
  return PosTag::kNoun;
}

std::vector<TaggedToken> PosTagger::tag(std::span<const Token> tokens) const {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) out.push_back({t.surface, tag_word(t.surface)});
  return out;
}

ParseNode ParseNode::make_leaf(TaggedToken token) {
  return ParseNode{PhraseLabel::kLeaf, {}, std::move(token)};
}

ParseNode chunk(std::span<const TaggedToken> tagged) { return Chunker(tagged).run(); }

std::vector<TaggedToken> flatten(const ParseNode &tree) {
  std::vector<TaggedToken> out;
  collect_leaves(tree, out);
  return out;
}

std::string to_string(const ParseNode &tree) {
  std::string out;
  render(tree, out);
  return out;
}

}  // namespace pds
