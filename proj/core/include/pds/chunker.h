#ifndef PDS_CHUNKER_H_
#define PDS_CHUNKER_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pds/preprocess.h"

namespace pds {

enum class PosTag { kNoun, kVerb, kAdj, kAdv, kPrep, kDet, kPron, kNum, kOther };

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);

struct TaggedToken {
  std::string surface;
  PosTag tag = PosTag::kNoun;

  bool operator==(const TaggedToken &) const = default;
};

// Lexicon-first part-of-speech tagger. Lookup order: exact lexicon entry,
// lexicon entry for the stem (open-class tags only), suffix rules, NOUN.
class PosTagger {
 public:
  PosTagger() = default;
  explicit PosTagger(std::unordered_map<std::string, PosTag> lexicon);

  // `word<TAB>TAG` per line; '#' starts a comment line.
  static PosTagger load(const std::filesystem::path &path);

  PosTag tag_word(std::string_view word) const;
  std::vector<TaggedToken> tag(std::span<const Token> tokens) const;

  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
  std::unordered_map<std::string, PosTag> stem_lexicon_;
};

enum class PhraseLabel { kS, kNP, kVP, kPP, kADJP, kLeaf };

std::string_view to_string(PhraseLabel label);

struct ParseNode {
  PhraseLabel label = PhraseLabel::kS;
  std::vector<ParseNode> children;
  std::optional<TaggedToken> leaf;  // set iff label == kLeaf

  static ParseNode make_leaf(TaggedToken token);
  bool is_leaf() const { return label == PhraseLabel::kLeaf; }
  bool operator==(const ParseNode &) const = default;
};

// Greedy left-to-right chunk grammar, no backtracking:
//   NP   := DET? NUM* ADJ* NOUN+  |  PRON
//   PP   := PREP NP
//   ADJP := ADV* ADJ+
//   VP   := VERB (ADV* VP | complement*)     complement := NP | PP | ADJP
// A verb directly followed (modulo adverbs) by another verb nests the rest
// of the chain as a child VP, so auxiliaries sit above the main verb.
// Tokens that start no phrase become LEAF children of S.
ParseNode chunk(std::span<const TaggedToken> tagged);

// In-order leaves; reproduces the chunker's input.
std::vector<TaggedToken> flatten(const ParseNode &tree);

// Bracketed form, e.g. "(S (NP novotel) (VP is (VP located ...)))".
std::string to_string(const ParseNode &tree);

}  // namespace pds

#endif  // PDS_CHUNKER_H_
