#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hbs/error.hpp"
#include "hbs/registry/discovery.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace hbs;
using namespace hbs::registry;
using hbs::testing::TempDir;
using hbs::testing::write_file;

namespace {

std::vector<std::string> names(const DiscoveryList& l) {
  std::vector<std::string> out;
  for (const auto& f : l.files) out.push_back(f.generic_string());
  return out;
}

TEST(Discovery, DepthFirstThenLexicographic) {
  TempDir t;
  for (auto f : {"a/b/c/foo.hbs", "d/bar.hbs", "e/f/zaz.hbs"}) write_file(t / f, "");
  EXPECT_EQ(names(discover(t.path())),
            (std::vector<std::string>{"d/bar.hbs", "e/f/zaz.hbs", "a/b/c/foo.hbs"}));
}

TEST(Discovery, EmptyDirectory) {
  TempDir t;
  EXPECT_TRUE(discover(t.path()).files.empty());
}

TEST(Discovery, EqualDepthTieBreak) {
  TempDir t;
  write_file(t / "x/b.hbs", "");
  write_file(t / "x/a.hbs", "");
  EXPECT_EQ(names(discover(t.path())), (std::vector<std::string>{"x/a.hbs", "x/b.hbs"}));
}

TEST(Discovery, OnlyHbsFilesAndNoHiddenDirs) {
  TempDir t;
  write_file(t / "a.hbs", "");
  write_file(t / "a.hbs.bak", "");
  write_file(t / "b.tcl", "");
  write_file(t / ".git/c.hbs", "");
  EXPECT_EQ(names(discover(t.path())), (std::vector<std::string>{"a.hbs"}));
}

TEST(Discovery, FollowsSymlinksOnceAndSurvivesCycles) {
  TempDir t;
  write_file(t / "real/x.hbs", "");
  fs::create_directory_symlink(t / "real", t / "link");
  fs::create_directory_symlink(t.path(), t / "real/loop");
  auto l = discover(t.path());
  EXPECT_EQ(l.files.size(), 1u);
  EXPECT_FALSE(l.warnings.empty());
}

TEST(Discovery, SymlinkedDirectoryIsScanned) {
  TempDir t, other;
  write_file(other / "y.hbs", "");
  fs::create_directory_symlink(other.path(), t / "ext");
  EXPECT_EQ(names(discover(t.path())), (std::vector<std::string>{"ext/y.hbs"}));
}

TEST(Discovery, MissingRootIsIoError) {
  try {
    discover("/nonexistent/hbs/root");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io_error);
  }
}

TEST(Discovery, PathDepth) {
  EXPECT_EQ(path_depth("a.hbs"), 0u);
  EXPECT_EQ(path_depth("a/b/c.hbs"), 2u);
}

// Random trees against a brute-force oracle: for every pair, the earlier
// file is not deeper, and at equal depth it is not lexicographically larger.
TEST(Discovery, RandomTreesMatchOracle) {
  std::mt19937 rng(1234);
  for (int iter = 0; iter < 50; ++iter) {
    TempDir t;
    std::vector<std::string> expected;
    const int n = 1 + rng() % 12;
    for (int i = 0; i < n; ++i) {
      std::string p;
      const int depth = rng() % 4;
      for (int d = 0; d < depth; ++d) p += std::string(1, "abcz"[rng() % 4]) + "/";
      p += std::string(1, "mnop"[rng() % 4]) + std::to_string(rng() % 3) + ".hbs";
      if (std::find(expected.begin(), expected.end(), p) != expected.end()) continue;
      write_file(t / p, "");
      expected.push_back(p);
    }
    auto got = names(discover(t.path()));
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      for (std::size_t j = i + 1; j < got.size(); ++j) {
        auto di = std::count(got[i].begin(), got[i].end(), '/');
        auto dj = std::count(got[j].begin(), got[j].end(), '/');
        ASSERT_TRUE(di < dj || (di == dj && got[i] < got[j])) << got[i] << " / " << got[j];
      }
    }
  }
}

}  // namespace
