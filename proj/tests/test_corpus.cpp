#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "bmikit/corpus.hpp"
#include "bmikit/errors.hpp"
#include "support/corpus_fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace bmikit;
using bmikit::testing::TempDir;

TEST(Vocab, InternIsIdempotent) {
  Vocab vocab;
  EXPECT_EQ(vocab.intern("a"), vocab.intern("a"));
  EXPECT_EQ(vocab.size(), 1u);
}

TEST(Vocab, AssignsDenseIdsInFirstOccurrenceOrder) {
  Vocab vocab;
  EXPECT_EQ(vocab.intern("a"), 0u);
  EXPECT_EQ(vocab.intern("b"), 1u);
  EXPECT_EQ(vocab.token(1), "b");
  EXPECT_EQ(vocab.find("b"), std::optional<TokenId>(1));
  EXPECT_FALSE(vocab.find("c").has_value());
}

TEST(Vocab, RejectsEmptyToken) {
  Vocab vocab;
  EXPECT_THROW(vocab.intern(""), ValidationError);
}

TEST(Vocab, IsBijective) {
  Vocab vocab;
  for (const char* t : {"x", "y", "x", "z", "y"}) vocab.intern(t);
  ASSERT_EQ(vocab.size(), 3u);
  for (TokenId id = 0; id < vocab.size(); ++id) EXPECT_EQ(vocab.find(vocab.token(id)), id);
}

TEST(LoadParallelCorpus, BuildsVocabsAndPairs) {
  TempDir dir;
  const auto src = dir.write_lines("s.txt", {"a b", "a c"});
  const auto tgt = dir.write_lines("t.txt", {"U", "V W"});
  const auto corpus = load_parallel_corpus(src, tgt);
  EXPECT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus.source_vocab().tokens(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(corpus.target_vocab().tokens(), (std::vector<std::string>{"U", "V", "W"}));
  EXPECT_EQ(corpus[1].index, 1u);
  EXPECT_EQ(corpus[1].source, (std::vector<TokenId>{0, 2}));
  EXPECT_EQ(corpus[1].target, (std::vector<TokenId>{1, 2}));
}

TEST(LoadParallelCorpus, LineCountMismatchNamesBothCounts) {
  TempDir dir;
  const auto src = dir.write_lines("s.txt", {"a", "b", "c"});
  const auto tgt = dir.write_lines("t.txt", {"U", "V"});
  try {
    load_parallel_corpus(src, tgt);
    FAIL() << "expected AlignmentError";
  } catch (const AlignmentError& e) {
    EXPECT_EQ(e.source_lines(), 3u);
    EXPECT_EQ(e.target_lines(), 2u);
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
  }
}

TEST(LoadParallelCorpus, DoubleSpacesProduceNoEmptyTokens) {
  // Oracle: split on ' ' and drop empty fields.
  const std::string line = "a  b   c ";
  std::vector<std::string> expected;
  std::stringstream ss(line);
  for (std::string field; std::getline(ss, field, ' ');) {
    if (!field.empty()) expected.push_back(field);
  }
  std::istringstream src(line + "\n");
  std::istringstream tgt("U\n");
  const auto corpus = read_parallel_corpus(src, tgt);
  std::vector<std::string> got;
  for (TokenId id : corpus[0].source) got.push_back(corpus.source_vocab().token(id));
  EXPECT_EQ(got, expected);
}

TEST(LoadParallelCorpus, EmptyLineIsParseErrorWithLineNumber) {
  std::istringstream src("a\n\nb\n");
  std::istringstream tgt("U\nV\nW\n");
  try {
    read_parallel_corpus(src, tgt);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadParallelCorpus, WhitespaceOnlyLineIsEmpty) {
  std::istringstream src("a\n   \n");
  std::istringstream tgt("U\nV\n");
  EXPECT_THROW(read_parallel_corpus(src, tgt), ParseError);
}

TEST(LoadParallelCorpus, InvalidUtf8ReportsByteOffset) {
  std::istringstream src("ab\ncd \xff" "e\n");
  std::istringstream tgt("U\nV\n");
  try {
    read_parallel_corpus(src, tgt);
    FAIL() << "expected EncodingError";
  } catch (const EncodingError& e) {
    EXPECT_EQ(e.byte_offset(), 6u);
  }
}

TEST(LoadParallelCorpus, TabInsideTokenIsRejected) {
  std::istringstream src("a\tb\n");
  std::istringstream tgt("U\n");
  EXPECT_THROW(read_parallel_corpus(src, tgt), ParseError);
}

TEST(LoadParallelCorpus, TrailingWhitespaceAndCarriageReturnStripped) {
  std::istringstream src("a b \r\n");
  std::istringstream tgt("U\t\n");
  const auto corpus = read_parallel_corpus(src, tgt);
  EXPECT_EQ(corpus[0].source.size(), 2u);
  EXPECT_EQ(corpus.target_vocab().token(0), "U");
}

TEST(LoadParallelCorpus, PreservesCaseAndMultibyteTokens) {
  std::istringstream src("Zhóuchéng zhóuchéng\n");
  std::istringstream tgt("bearings\n");
  const auto corpus = read_parallel_corpus(src, tgt);
  EXPECT_EQ(corpus.source_vocab().size(), 2u);
}

TEST(FindInvalidUtf8, AcceptsValidAndRejectsMalformed) {
  EXPECT_FALSE(find_invalid_utf8("plain ascii").has_value());
  EXPECT_FALSE(find_invalid_utf8("\xe8\xbd\xb4\xe6\x89\xbf").has_value());
  EXPECT_FALSE(find_invalid_utf8("\xf0\x9f\x98\x80").has_value());
  EXPECT_EQ(find_invalid_utf8("a\xc0\x80"), 1u);      // overlong
  EXPECT_EQ(find_invalid_utf8("\xed\xa0\x80"), 1u);   // surrogate
  EXPECT_EQ(find_invalid_utf8("ab\xe8\xbd"), 2u);     // truncated
  EXPECT_EQ(find_invalid_utf8("\xe8\x41\x80"), 1u);   // bad continuation
}

TEST(ValidateAlignment, CleanFiles) {
  TempDir dir;
  const auto src = dir.write_lines("s.txt", {"a b", "c"});
  const auto tgt = dir.write_lines("t.txt", {"U", "V W X"});
  const auto report = validate_alignment(src, tgt);
  EXPECT_EQ(report.pairs, 2u);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_EQ(report.max_source_length, 2u);
  EXPECT_EQ(report.max_target_length, 3u);
}

TEST(ValidateAlignment, ReportsEmptyTargetLine) {
  TempDir dir;
  const auto src = dir.write_lines("s.txt", {"a", "b", "c", "d", "e", "f"});
  const auto tgt = dir.write_lines("t.txt", {"U", "V", "W", "X", "", "Z"});
  const auto report = validate_alignment(src, tgt);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].kind, AlignmentViolation::Kind::empty_line);
  EXPECT_EQ(report.violations[0].side, Side::target);
  EXPECT_EQ(report.violations[0].line, 5u);
}

TEST(ValidateAlignment, CollectsEveryViolation) {
  TempDir dir;
  std::vector<std::string> src_lines(10, "a");
  std::vector<std::string> tgt_lines(9, "U");
  src_lines[2] = "";
  tgt_lines[7] = " ";
  const auto report = validate_alignment(dir.write_lines("s.txt", src_lines), dir.write_lines("t.txt", tgt_lines));
  EXPECT_EQ(report.source_lines, 10u);
  EXPECT_EQ(report.target_lines, 9u);
  EXPECT_EQ(report.pairs, 9u);
  ASSERT_EQ(report.violations.size(), 3u);
  EXPECT_EQ(report.violations.back().kind, AlignmentViolation::Kind::count_mismatch);
}

TEST(ValidateAlignment, DoesNotModifyInputs) {
  TempDir dir;
  const auto src = dir.write("s.txt", "a  b \n");
  const auto tgt = dir.write("t.txt", "U\n");
  validate_alignment(src, tgt);
  EXPECT_EQ(bmikit::testing::read_file(src), "a  b \n");
}

TEST(CorpusProperties, WriteSideReproducesNormalizedInput) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto text = bmikit::testing::random_text_corpus(rng);
    std::string src_in, tgt_in, src_norm, tgt_norm;
    for (const auto& p : text) {
      // Noise the input with extra spaces; normalization must remove it.
      src_in += "  " + bmikit::testing::join(p.source) + "   \n";
      tgt_in += bmikit::testing::join(p.target) + " \n";
      src_norm += bmikit::testing::join(p.source) + "\n";
      tgt_norm += bmikit::testing::join(p.target) + "\n";
    }
    std::istringstream src(src_in), tgt(tgt_in);
    const auto corpus = read_parallel_corpus(src, tgt);
    std::ostringstream src_out, tgt_out;
    write_side(corpus, Side::source, src_out);
    write_side(corpus, Side::target, tgt_out);
    EXPECT_EQ(src_out.str(), src_norm);
    EXPECT_EQ(tgt_out.str(), tgt_norm);
  }
}

TEST(CorpusProperties, VocabIdsStableAcrossIdenticalInputs) {
  std::mt19937_64 rng(11);
  const auto text = bmikit::testing::random_text_corpus(rng);
  const auto a = bmikit::testing::to_corpus(text);
  const auto b = bmikit::testing::to_corpus(text);
  EXPECT_EQ(a.source_vocab(), b.source_vocab());
  EXPECT_EQ(a.target_vocab(), b.target_vocab());
}
