#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "hrsn/corpus.hpp"
#include "hrsn/text.hpp"

namespace hrsn {
namespace {

VerificationInstance instance(std::vector<std::string> known, std::string unknown, int label) {
  VerificationInstance inst;
  inst.known_docs = std::move(known);
  inst.unknown_doc = std::move(unknown);
  inst.label = label;
  return inst;
}

TEST(ConcatenateKnown, Singleton) {
  EXPECT_EQ(concatenate_known(instance({"Only one."}, "u", 1)), "Only one.");
}

TEST(ConcatenateKnown, ReversedOrder) {
  const std::vector<std::size_t> order{1, 0};
  EXPECT_EQ(concatenate_known(instance({"A", "B"}, "u", 1), order), "B\nA");
}

TEST(ConcatenateKnown, PermutationsShareSentences) {
  const auto inst = instance({"One a. Two b.", "Three c.", "Four d. Five e."}, "u", 0);
  const std::vector<std::size_t> fwd{0, 1, 2};
  const std::vector<std::size_t> rev{2, 1, 0};
  const auto a = concatenate_known(inst, fwd);
  const auto b = concatenate_known(inst, rev);
  EXPECT_NE(a, b);
  auto sa = segment_sentences(a);
  auto sb = segment_sentences(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  EXPECT_EQ(sa, sb);
  EXPECT_EQ(sa.size(), 5u);
}

TEST(ConcatenateKnown, RejectsNonPermutation) {
  const auto inst = instance({"A", "B"}, "u", 1);
  for (const std::vector<std::size_t>& bad :
       {std::vector<std::size_t>{0, 0}, std::vector<std::size_t>{0}, std::vector<std::size_t>{0, 2}}) {
    EXPECT_THROW(concatenate_known(inst, bad), Error);
  }
}

TEST(Instance, Validation) {
  EXPECT_THROW(instance({}, "u", 1).validate(), Error);
  EXPECT_THROW(instance({"k"}, "u", 2).validate(), Error);
  EXPECT_NO_THROW(instance({"k"}, "u", 0).validate());
}

TEST(Jsonl, RoundTripIsByteExact) {
  Corpus corpus{instance({"Caf\xc3\xa9 \"quoted\"\ttab", "line\nbreak"}, "unknown \\ text", 1),
                instance({"x"}, "y", 0)};
  std::ostringstream out;
  save_corpus(corpus, out);
  std::istringstream in(out.str());
  const Corpus again = load_corpus(in);
  EXPECT_EQ(again, corpus);
  std::ostringstream out2;
  save_corpus(again, out2);
  EXPECT_EQ(out2.str(), out.str());
}

TEST(Jsonl, ErrorsNameTheLine) {
  std::istringstream in("{\"known\":[\"a\"],\"unknown\":\"b\",\"label\":1}\n{\"known\":[],\"unknown\":\"b\",\"label\":1}\n");
  try {
    load_corpus(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Jsonl, SkipsBlankLines) {
  std::istringstream in("\n{\"known\":[\"a\"],\"unknown\":\"b\",\"label\":0}\n\n");
  EXPECT_EQ(load_corpus(in).size(), 1u);
}

}  // namespace
}  // namespace hrsn
