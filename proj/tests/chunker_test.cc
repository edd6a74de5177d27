#include "pds/chunker.h"

#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "pds/errors.h"
#include "test_support.h"

namespace pds {
namespace {

using testing::resources;

const PosTagger &tagger() { return resources().tagger; }

std::vector<TaggedToken> tag_text(std::string_view text) {
  return tagger().tag(resources().pre.tokenize(text));
}

std::vector<PosTag> tags(const std::vector<TaggedToken> &tt) {
  std::vector<PosTag> out;
  for (const auto &t : tt) out.push_back(t.tag);
  return out;
}

bool has_label(const ParseNode &n, PhraseLabel label) {
  if (n.label == label) return true;
  for (const auto &c : n.children) {
    if (has_label(c, label)) return true;
  }
  return false;
}

TEST(PosTagger, NovotelSentence) {
  using enum PosTag;
  EXPECT_EQ(tags(tag_text("novotel is located in hyderabad")),
            (std::vector<PosTag>{kNoun, kVerb, kVerb, kPrep, kNoun}));
}

TEST(PosTagger, DefaultsAndSuffixRules) {
  EXPECT_TRUE(tagger().tag({}).empty());
  EXPECT_EQ(tagger().tag_word("zzyzx"), PosTag::kNoun);
  EXPECT_EQ(tagger().tag_word("blorfed"), PosTag::kVerb);
  EXPECT_EQ(tagger().tag_word("blorfing"), PosTag::kVerb);
  EXPECT_EQ(tagger().tag_word("blorfly"), PosTag::kAdv);
  EXPECT_EQ(tagger().tag_word("1234"), PosTag::kNum);
  EXPECT_EQ(tagger().tag_word("debit card"), PosTag::kNoun);
}

TEST(PosTagger, LexiconBeatsSuffixRules) {
  EXPECT_EQ(tagger().tag_word("the"), PosTag::kDet);
  EXPECT_EQ(tagger().tag_word("he"), PosTag::kPron);
  EXPECT_EQ(tagger().tag_word("kill"), PosTag::kVerb);
  EXPECT_EQ(tagger().tag_word("bank"), PosTag::kNoun);
}

TEST(PosTagger, TagNamesRoundTrip) {
  for (auto t : {PosTag::kNoun, PosTag::kVerb, PosTag::kAdj, PosTag::kAdv, PosTag::kPrep, PosTag::kDet,
                 PosTag::kPron, PosTag::kNum, PosTag::kOther}) {
    EXPECT_EQ(parse_pos_tag(to_string(t)), t);
  }
  EXPECT_FALSE(parse_pos_tag("VERBISH").has_value());
}

TEST(PosTagger, BadLexiconLine) {
  testing::TempDir dir;
  std::ofstream(dir.path() / "t.tsv") << "# comment\nok\tNOUN\nbad\tNOPE\n";
  EXPECT_THROW(PosTagger::load(dir.path() / "t.tsv"), ValidationError);
  EXPECT_THROW(PosTagger::load(dir.path() / "missing.tsv"), IoError);
}

TEST(Chunk, NovotelTree) {
  auto tree = chunk(tag_text("Novotel is located in Hyderabad"));
  EXPECT_EQ(to_string(tree), "(S (NP novotel) (VP is (VP located (PP in (NP hyderabad)))))");
}

TEST(Chunk, SingleNoun) { EXPECT_EQ(to_string(chunk(tag_text("pizza"))), "(S (NP pizza))"); }

TEST(Chunk, EmptyInput) {
  auto tree = chunk({});
  EXPECT_EQ(tree.label, PhraseLabel::kS);
  EXPECT_TRUE(tree.children.empty());
}

TEST(Chunk, NoVerbMeansNoVp) {
  EXPECT_FALSE(has_label(chunk(tag_text("the red bank card")), PhraseLabel::kVP));
}

TEST(Chunk, NounPhraseShapes) {
  using enum PosTag;
  std::vector<TaggedToken> t = {{"the", kDet}, {"4", kNum}, {"deluxe", kAdj}, {"room", kNoun}, {"block", kNoun}};
  EXPECT_EQ(to_string(chunk(t)), "(S (NP the 4 deluxe room block))");
  std::vector<TaggedToken> lone = {{"the", kDet}, {"of", kPrep}};
  EXPECT_EQ(to_string(chunk(lone)), "(S the of)");
}

TEST(Chunk, VerbTakesSeveralComplements) {
  EXPECT_EQ(to_string(chunk(tag_text("He would kill anybody for a bar of chocolate"))),
            "(S (NP he) (VP would (VP kill (NP anybody) (PP for (NP a bar)) (PP of (NP chocolate)))))");
}

TEST(Chunk, AdverbBetweenVerbsStaysInVp) {
  EXPECT_EQ(to_string(chunk(tag_text("Joe is so fond of chocolates"))),
            "(S (NP joe) (VP is so (VP fond (PP of (NP chocolates)))))");
}

// --- properties ---------------------------------------------------------------

std::vector<TaggedToken> random_tagged(std::mt19937 &rng) {
  static const std::vector<PosTag> all = {PosTag::kNoun, PosTag::kVerb, PosTag::kAdj, PosTag::kAdv, PosTag::kPrep,
                                          PosTag::kDet,  PosTag::kPron, PosTag::kNum, PosTag::kOther};
  std::uniform_int_distribution<std::size_t> len(0, 16);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::vector<TaggedToken> out;
  for (std::size_t i = len(rng); i > 0; --i) out.push_back({"w" + std::to_string(out.size()), all[pick(rng)]});
  return out;
}

void check_shape(const ParseNode &n) {
  if (n.is_leaf()) {
    ASSERT_TRUE(n.leaf.has_value());
    ASSERT_TRUE(n.children.empty());
    return;
  }
  ASSERT_FALSE(n.leaf.has_value());
  if (n.label != PhraseLabel::kS) ASSERT_FALSE(n.children.empty());
  for (const auto &c : n.children) check_shape(c);
}

TEST(ChunkProperty, FlattenRestoresInput) {
  std::mt19937 rng(3);
  for (int i = 0; i < 5000; ++i) {
    auto t = random_tagged(rng);
    auto tree = chunk(t);
    ASSERT_EQ(flatten(tree), t);
    check_shape(tree);
  }
}

TEST(ChunkProperty, Deterministic) {
  std::mt19937 rng(5);
  for (int i = 0; i < 1000; ++i) {
    auto t = random_tagged(rng);
    ASSERT_EQ(chunk(t), chunk(t));
  }
}

TEST(ChunkProperty, VerbsOnlyInsideVp) {
  std::mt19937 rng(9);
  for (int i = 0; i < 2000; ++i) {
    auto tree = chunk(random_tagged(rng));
    for (const auto &c : tree.children) {
      if (c.is_leaf()) ASSERT_NE(c.leaf->tag, PosTag::kVerb);
    }
  }
}

}  // namespace
}  // namespace pds
