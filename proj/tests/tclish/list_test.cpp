#include <gtest/gtest.h>

#include <random>

#include "hbs/error.hpp"
#include "hbs/tclish/list.hpp"

using namespace hbs::tclish;

namespace {

TEST(List, SplitBasic) {
  EXPECT_EQ(split_list("a b  c"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(split_list("{a b} \"c d\" e"), (std::vector<std::string>{"a b", "c d", "e"}));
  EXPECT_TRUE(split_list("  ").empty());
  EXPECT_EQ(split_list("a\\ b"), (std::vector<std::string>{"a b"}));
}

TEST(List, SplitErrors) {
  EXPECT_THROW(split_list("{a"), hbs::Error);
  EXPECT_THROW(split_list("{a}b"), hbs::Error);
  EXPECT_THROW(split_list("\"a"), hbs::Error);
}

TEST(List, QuoteMatchesTcl) {
  // Values produced by the reference shell's `list`.
  EXPECT_EQ(quote_element(""), "{}");
  EXPECT_EQ(quote_element("a b"), "{a b}");
  EXPECT_EQ(quote_element("#x", true), "{#x}");
  EXPECT_EQ(quote_element("#x", false), "#x");
  EXPECT_EQ(quote_element("a\"b"), "a\\\"b");
  EXPECT_EQ(quote_element("x{"), "x\\{");
  EXPECT_EQ(quote_element("\\"), "\\\\");
  EXPECT_EQ(quote_element("$v"), "{$v}");
}

TEST(List, MakeList) {
  std::vector<std::string> v{"a", "b c", ""};
  EXPECT_EQ(make_list(v), "a {b c} {}");
}

TEST(List, Concat) {
  std::vector<std::string> v{" a ", "", "b c  "};
  EXPECT_EQ(concat(v), "a b c");
}

// Any element list survives make_list -> split_list.
TEST(List, RoundTripRandom) {
  std::mt19937 rng(7);
  const std::string alphabet = "ab {}[]$;\"\\#\n\t x";
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<std::string> elems(rng() % 5);
    for (auto& e : elems) {
      const int len = rng() % 6;
      for (int i = 0; i < len; ++i) e += alphabet[rng() % alphabet.size()];
    }
    const std::string list = make_list(elems);
    EXPECT_EQ(split_list(list), elems) << list;
  }
}

}  // namespace
