#include <gtest/gtest.h>

#include <set>

#include "subchar/decomposition.h"
#include "subchar/tokens.h"

using namespace subchar;

namespace {

const DecompositionTable& sample() {
  static const DecompositionTable t = DecompositionTable::load_file(SUBCHAR_DATA_DIR "/sample_table.tsv");
  return t;
}

std::vector<std::string> tokens_of(const UnitStream& s, const SymbolSet* inv = nullptr) { return format_stream(s, inv); }

}  // namespace

TEST(Table, ParsesEntriesAndDropsStructureOperators) {
  const auto t = DecompositionTable::parse("# comment\n\n驰\t⿰ 马 也\t㇕ ㇉ ㇐ ㇆ ㇑ ㇟\n");
  ASSERT_EQ(t.size(), 1u);
  const CharEntry* e = t.find("驰");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->ideographs, (std::vector<std::string>{"马", "也"}));
  EXPECT_EQ(e->strokes.size(), 6u);
  EXPECT_TRUE(t.inventory(DecompLevel::Ideograph).count("马"));
  EXPECT_FALSE(t.inventory(DecompLevel::Ideograph).count("⿰"));
}

TEST(Table, SharedComponentDecompositions) {
  const std::map<std::string, std::vector<std::string>> expected = {
      {"驰", {"马", "也"}}, {"池", {"氵", "也"}}, {"施", {"方", "也"}},
      {"弛", {"弓", "也"}}, {"地", {"土", "也"}}, {"驱", {"马", "区"}}};
  for (const auto& [ch, ideos] : expected) {
    const CharEntry* e = sample().find(ch);
    ASSERT_NE(e, nullptr) << ch;
    EXPECT_EQ(e->ideographs, ideos) << ch;
  }
}

TEST(Table, TagsFollowCodePointOrder) {
  const auto& t = sample();
  // 只 (U+53EA) and 叭 (U+53ED) share 口 八.
  EXPECT_EQ(t.find("只")->ideo_tag, 0u);
  EXPECT_EQ(t.find("叭")->ideo_tag, 1u);
  // 人 < 入 < 八 share one stroke sequence but not an ideograph sequence.
  EXPECT_EQ(t.find("人")->stroke_tag, 0u);
  EXPECT_EQ(t.find("入")->stroke_tag, 1u);
  EXPECT_EQ(t.find("八")->stroke_tag, 2u);
  EXPECT_EQ(t.find("八")->ideo_tag, 0u);
  EXPECT_EQ(t.lookup(DecompLevel::Ideograph, {"口", "八"}, 1), "叭");
  EXPECT_FALSE(t.lookup(DecompLevel::Ideograph, {"口", "八"}, 2));
}

TEST(Table, EveryCharacterHasAUniqueKeyAtBothLevels) {
  for (DecompLevel level : {DecompLevel::Ideograph, DecompLevel::Stroke}) {
    std::set<std::pair<std::vector<std::string>, uint32_t>> keys;
    for (const auto& e : sample().entries()) {
      EXPECT_TRUE(keys.insert({e.units(level), e.tag(level)}).second) << e.character;
      EXPECT_EQ(sample().lookup(level, e.units(level), e.tag(level)), e.character);
    }
  }
}

TEST(Table, ReportsMalformedLines) {
  try {
    DecompositionTable::parse("木\t木\t㇐\n林\t木 木\t㇐\n木\t木\t㇑\n");
    FAIL();
  } catch (const TableError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  EXPECT_THROW(DecompositionTable::parse("木\t木\n"), TableError);
  EXPECT_THROW(DecompositionTable::parse("木\t⿰\t㇐\n"), TableError);
  EXPECT_THROW(DecompositionTable::parse("木\t木 <\t㇐\n"), TableError);
  EXPECT_THROW(DecompositionTable::parse("木木\t木\t㇐\n"), TableError);
  EXPECT_THROW(DecompositionTable::load_file("/nonexistent/table.tsv"), Error);
}

TEST(Encode, SenLinYieldsFiveWoodUnits) {
  const UnitStream s = encode_text(sample(), {"森林"}, DecompLevel::Ideograph);
  std::size_t wood = 0, markers = 0;
  for (const auto& u : s) {
    if (u.kind() == UnitKind::Ideograph) {
      EXPECT_EQ(u.symbol(), "木");
      ++wood;
    }
    if (u.kind() == UnitKind::EocMarker) ++markers;
  }
  EXPECT_EQ(wood, 5u);
  EXPECT_EQ(markers, 2u);
  EXPECT_EQ(tokens_of(s), (std::vector<std::string>{"木", "木", "木", "</c0>", "木", "木", "</c0>"}));
}

TEST(Encode, PassthroughAndBoundaries) {
  const auto& inv = sample().inventory(DecompLevel::Ideograph);
  const UnitStream s = encode_text(sample(), {"AI", "", "木<"}, DecompLevel::Ideograph);
  EXPECT_EQ(tokens_of(s, &inv), (std::vector<std::string>{"A", "I", "▁", "木", "</c0>", "\\<"}));
  EXPECT_EQ(decode_text(sample(), s, DecompLevel::Ideograph), (std::vector<std::string>{"AI", "木<"}));
}

TEST(Encode, PassthroughCollidingWithInventoryIsEscaped) {
  // 氵 is a component but not a table character.
  ASSERT_EQ(sample().find("氵"), nullptr);
  const auto& inv = sample().inventory(DecompLevel::Ideograph);
  const UnitStream s = encode_text(sample(), {"氵"}, DecompLevel::Ideograph);
  const auto toks = tokens_of(s, &inv);
  EXPECT_EQ(toks, (std::vector<std::string>{"\\氵"}));
  EXPECT_EQ(parse_stream(toks, DecompLevel::Ideograph, &inv), s);
}

TEST(Decode, RoundTripsAtBothLevels) {
  const std::vector<std::string> words{"驰", "池施", "只叭", "人入八", "NMT", "\\@▁", "の", "森林"};
  for (DecompLevel level : {DecompLevel::Ideograph, DecompLevel::Stroke}) {
    const auto& inv = sample().inventory(level);
    const UnitStream s = encode_text(sample(), words, level);
    EXPECT_EQ(decode_text(sample(), s, level), words);
    const UnitStream back = parse_stream(tokens_of(s, &inv), level, &inv);
    EXPECT_EQ(back, s);
  }
}

TEST(Decode, ErrorsAndLenientMode) {
  const UnitStream dangling{Unit::ideograph("木"), Unit::ideograph("木")};
  EXPECT_THROW(decode_text(sample(), dangling, DecompLevel::Ideograph), DecodeError);
  DecodeOptions lenient{true, "?"};
  EXPECT_EQ(decode_text(sample(), dangling, DecompLevel::Ideograph, lenient), (std::vector<std::string>{"?"}));

  const UnitStream unknown{Unit::ideograph("木"), Unit::eoc(7)};
  try {
    decode_text(sample(), unknown, DecompLevel::Ideograph);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.position(), 0u);
  }
  const UnitStream bare{Unit::passthrough("a"), Unit::eoc(0)};
  EXPECT_THROW(decode_text(sample(), bare, DecompLevel::Ideograph), DecodeError);
  EXPECT_EQ(decode_text(sample(), bare, DecompLevel::Ideograph, lenient), (std::vector<std::string>{"a?"}));
  const UnitStream wrong_level{Unit::stroke("㇐"), Unit::eoc(0)};
  EXPECT_THROW(decode_text(sample(), wrong_level, DecompLevel::Ideograph), DecodeError);
}

TEST(Units, GranularityNames) {
  EXPECT_EQ(parse_granularity("ideograph-bpe"), Granularity::IdeographBpe);
  EXPECT_EQ(parse_granularity("stroke"), Granularity::StrokeBpe);
  EXPECT_EQ(parse_granularity("char"), Granularity::Char);
  EXPECT_THROW(parse_granularity("pinyin"), Error);
  EXPECT_TRUE(uses_bpe(Granularity::CharBpe));
  EXPECT_FALSE(uses_table(Granularity::CharBpe));
  for (Granularity g : {Granularity::Word, Granularity::Char, Granularity::CharBpe, Granularity::IdeographBpe,
                        Granularity::StrokeBpe}) {
    EXPECT_EQ(parse_granularity(to_string(g)), g);
  }
}

TEST(Units, MalformedTokensAreRejected) {
  EXPECT_THROW(parse_unit_token("木木", DecompLevel::Ideograph), Error);
  EXPECT_THROW(parse_unit_token("<", DecompLevel::Ideograph), Error);
  EXPECT_THROW(parse_unit_token("\\", DecompLevel::Ideograph), Error);
  EXPECT_EQ(parse_unit_token("</c3>", DecompLevel::Ideograph), Unit::eoc(3));
  EXPECT_EQ(parse_unit_token("▁", DecompLevel::Ideograph), Unit::word_boundary());
}

TEST(Coverage, CountsSampleCorpus) {
  std::vector<std::vector<std::string>> corpus{{"森林", "AI"}, {"木"}};
  const CoverageReport r = coverage_stats(sample(), corpus);
  EXPECT_EQ(r.sentences, 2u);
  EXPECT_EQ(r.graphemes, 5u);
  EXPECT_EQ(r.passthrough, 2u);
  EXPECT_EQ(r.distinct_characters, 5u);
  EXPECT_EQ(r.distinct_covered, 3u);
  EXPECT_EQ(r.distinct_ideographs, 1u);
  EXPECT_DOUBLE_EQ(r.passthrough_rate(), 0.4);
  EXPECT_EQ(r.ideograph_histogram.at("木"), 6u);
}
