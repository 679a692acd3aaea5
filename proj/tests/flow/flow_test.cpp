#include <gtest/gtest.h>

#include "hbs/backends/backend.hpp"
#include "hbs/error.hpp"
#include "hbs/flow/context.hpp"
#include "hbs/process.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace hbs;
using namespace hbs::flow;
using hbs::testing::fixture;
using hbs::testing::Loaded;
using hbs::testing::TempDir;
using hbs::testing::write_file;

namespace {

using Strings = std::vector<std::string>;

Errc run_error(Session& s, std::string_view target, Strings argv = {}) {
  try {
    s.run(target, argv);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error running " << target;
  return Errc::usage;
}

struct Tree : ::testing::Test {
  TempDir root, work;
  std::unique_ptr<Loaded> l;

  void load(const std::string& text, bool dry = false) {
    write_file(root / "t.hbs", text);
    l = std::make_unique<Loaded>(root.path(), work.path(), dry);
  }
  Session& s() { return l->session; }
  std::string out() { return l->sink.out(); }
};

TEST(Flow, RunPrint) {
  TempDir work;
  Loaded l(fixture("hello"), work.path());
  l.session.run("core::print", {});
  EXPECT_EQ(l.sink.out(), "Hello!\n");
}

TEST(Flow, RunWithArgument) {
  TempDir work;
  Loaded l(fixture("stage-arg"), work.path());
  Strings argv{"synthesis"};
  l.session.run("core::target", argv);
  EXPECT_EQ(l.sink.out(), "Running until synthesis\n");
}

TEST(Flow, UnknownTarget) {
  TempDir work;
  Loaded l(fixture("hello"), work.path());
  EXPECT_EQ(run_error(l.session, "nosuch::tgt"), Errc::unknown_target);
  EXPECT_EQ(run_error(l.session, "core::nope"), Errc::unknown_target);
}

TEST(Flow, GeneratorDependency) {
  TempDir work;
  Loaded l(fixture("generator"), work.path());
  l.session.run("core::top", {});
  EXPECT_EQ(l.sink.out(), "Generating foo.vhd\nAdding file foo.vhd\nAdding file top.vhd\n");
}

TEST_F(Tree, DiamondRunsSharedDepOnce) {
  load(R"(set ::count 0
namespace eval g {
  proc a {} { hbs::AddDep g::b; hbs::AddDep g::c }
  proc b {} { hbs::AddDep g::d }
  proc c {} { hbs::AddDep g::d }
  proc d {} { set ::count [expr {$::count + 1}] }
  hbs::Register
})");
  s().run("g::a", {});
  EXPECT_EQ(s().interp().get_var("::count"), "1");
}

TEST_F(Tree, DistinctArgvRunTwice) {
  load(R"(set ::count 0
namespace eval g {
  proc a {} { hbs::AddDep g::b; hbs::AddDep g::c }
  proc b {} { hbs::AddDep g::d x }
  proc c {} { hbs::AddDep g::d y; hbs::AddDep g::d x }
  proc d {v} { set ::count [expr {$::count + 1}] }
  hbs::Register
})");
  s().run("g::a", {});
  EXPECT_EQ(s().interp().get_var("::count"), "2");
}

TEST_F(Tree, ArgvIsTextual) {
  load(R"(set ::count 0
namespace eval g {
  proc a {} { hbs::AddDep g::d {a b}; hbs::AddDep g::d a b }
  proc d {args} { set ::count [expr {$::count + 1}] }
  hbs::Register
})");
  s().run("g::a", {});
  EXPECT_EQ(s().interp().get_var("::count"), "2");
}

TEST_F(Tree, DirectCallAlwaysRuns) {
  load(R"(set ::count 0
namespace eval g {
  proc a {} { hbs::AddDep g::d; hbs::AddDep g::d; g::d; d }
  proc d {} { set ::count [expr {$::count + 1}] }
  hbs::Register
})");
  s().run("g::a", {});
  EXPECT_EQ(s().interp().get_var("::count"), "3");
}

TEST_F(Tree, ThisPathsSwapDuringDep) {
  load(R"(namespace eval p {
  proc a {} {
    puts "$hbs::ThisCorePath $hbs::ThisTargetPath"
    hbs::AddDep q::b
    puts "$hbs::ThisCorePath $hbs::ThisTargetPath"
  }
  hbs::Register
}
namespace eval q {
  proc b {} { puts "$hbs::ThisCorePath $hbs::ThisTargetPath" }
  hbs::Register
})");
  s().run("p::a", {});
  EXPECT_EQ(out(), "p p::a\nq q::b\np p::a\n");
}

TEST_F(Tree, AddDepUnknownTarget) {
  load("namespace eval p { proc a {} { hbs::AddDep no::such }; hbs::Register }");
  EXPECT_EQ(run_error(s(), "p::a"), Errc::unknown_target);
}

TEST(Flow, SelfDependencyIsCycle) {
  TempDir work;
  Loaded l(fixture("cycle"), work.path());
  EXPECT_EQ(run_error(l.session, "cyc::self"), Errc::dependency_cycle);
  try {
    l.session.graph("cyc::a", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dependency_cycle);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("cyc::a"), std::string::npos) << msg;
    EXPECT_NE(msg.find("cyc::b"), std::string::npos) << msg;
  }
}

TEST(Flow, GraphOfGenerator) {
  TempDir work;
  Loaded l(fixture("generator"), work.path());
  const auto before = spawn_count();
  DepGraph g = l.session.graph("core::top", {});
  EXPECT_EQ(spawn_count(), before);
  ASSERT_EQ(g.nodes().size(), 2u);
  ASSERT_EQ(g.edges().size(), 1u);
  DepNode top{"core::top", {}}, gen{"generator::gen", {"foo"}};
  EXPECT_TRUE(g.has_edge(top, gen));
  const std::string dot = emit_dot(g);
  EXPECT_NE(dot.find("\"core::top\" -> \"generator::gen foo\""), std::string::npos) << dot;
  EXPECT_EQ(dot, emit_dot(l.session.graph("core::top", {})));
}

TEST(Flow, GraphEqualsRunGraph) {
  TempDir work;
  Loaded l(fixture("generator"), work.path());
  DepGraph dry = l.session.graph("core::top", {});
  l.session.run("core::top", {});
  EXPECT_EQ(l.session.context().graph, dry);
}

TEST_F(Tree, LeafGraph) {
  load("namespace eval p { proc a {} {}; hbs::Register }");
  DepGraph g = s().graph("p::a", {});
  EXPECT_EQ(g.nodes().size(), 1u);
  EXPECT_TRUE(g.edges().empty());
}

TEST(Flow, EmitDotSingleNode) {
  DepGraph g;
  g.add_node({"a::b", {}});
  EXPECT_EQ(emit_dot(g), "digraph deps {\n  \"a::b\";\n}\n");
}

TEST(Flow, DepGraphDedupsEdges) {
  DepGraph g;
  DepNode a{"a", {}}, b{"b", {"x y"}};
  g.add_edge(a, b);
  g.add_edge(a, b);
  EXPECT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(b.label(), "b {x y}");
}

TEST_F(Tree, SetStateBuiltins) {
  load(R"(namespace eval p {
  proc a {} {
    hbs::SetTool "ghdl"
    hbs::SetTop tb_edge_detector_sync
    hbs::SetDevice xc7
    hbs::SetGeneric G 4
    hbs::SetExitSeverity error
    hbs::SetArgPrefix -v
    hbs::SetArgSuffix --dump-arrays
  }
  hbs::Register
})");
  s().run("p::a", {});
  const auto& c = s().context();
  EXPECT_EQ(c.tool, "ghdl");
  EXPECT_EQ(c.top, "tb_edge_detector_sync");
  EXPECT_EQ(c.device, "xc7");
  EXPECT_EQ(c.generics.at("G"), "4");
  EXPECT_EQ(c.exit_severity, "error");
  EXPECT_EQ(c.arg_prefix, "-v");
  EXPECT_EQ(c.arg_suffix, "--dump-arrays");
  EXPECT_EQ(s().interp().get_var("hbs::Tool"), "ghdl");
  EXPECT_EQ(s().interp().get_var("hbs::Top"), "tb_edge_detector_sync");
}

TEST_F(Tree, StateErrors) {
  load(R"(namespace eval p {
  proc sev {} { hbs::SetExitSeverity bogus }
  proc tool {} { hbs::SetTool notool }
  proc std {} { hbs::SetStd 2011 }
  proc switch {} { hbs::SetTool ghdl; hbs::AddFile x.vhd; hbs::SetTool vivado-prj }
  proc same {} { hbs::SetTool ghdl; hbs::AddFile x.vhd; hbs::SetTool ghdl }
  hbs::Register
})", true);
  EXPECT_EQ(run_error(s(), "p::sev"), Errc::invalid_severity);
  EXPECT_EQ(run_error(s(), "p::tool"), Errc::unknown_tool);
  EXPECT_EQ(run_error(s(), "p::std"), Errc::invalid_std);
  EXPECT_EQ(run_error(s(), "p::switch"), Errc::tool_already_set);
  EXPECT_NO_THROW(s().run("p::same", {}));
}

TEST(Flow, AddFileWithLibrary) {
  TempDir work;
  Loaded l(fixture("edge-detector"), work.path());
  l.session.run("vhdl::simple::edge-detector::src", {});
  const auto& files = l.session.context().files;
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].lib, "simple");
  EXPECT_EQ(files[0].kind, FileKind::vhdl);
  EXPECT_EQ(files[0].path, fixture("edge-detector") / "ip/edge/src/edge_detector.vhd");
}

TEST_F(Tree, AddFileKindsAndDedup) {
  for (auto f : {"a.vhd", "b.xdc", "c.tcl", "d.sv", "e.v", "f.sdc", "g.txt"}) write_file(root / f, "");
  load(R"(namespace eval p {
  proc a {} {
    hbs::AddFile a.vhd b.xdc c.tcl
    hbs::AddFile d.sv e.v f.sdc g.txt a.vhd
    hbs::SetLib other
    hbs::AddFile a.vhd
  }
  hbs::Register
})");
  s().run("p::a", {});
  const auto& files = s().context().files;
  ASSERT_EQ(files.size(), 8u);
  EXPECT_EQ(files[1].kind, FileKind::constraint_xdc);
  EXPECT_EQ(file_kind_name(files[1].kind), "constraint-xdc");
  EXPECT_EQ(files[2].kind, FileKind::tcl);
  EXPECT_EQ(files[3].kind, FileKind::systemverilog);
  EXPECT_EQ(files[4].kind, FileKind::verilog);
  EXPECT_EQ(files[5].kind, FileKind::constraint_sdc);
  EXPECT_EQ(files[6].kind, FileKind::other);
  EXPECT_EQ(files[7].lib, "other");
}

TEST_F(Tree, AddFileMissing) {
  load("namespace eval p { proc a {} { hbs::AddFile missing.vhd }; hbs::Register }");
  EXPECT_EQ(run_error(s(), "p::a"), Errc::file_not_found);
}

TEST_F(Tree, AddFileMissingIsFineInDryRun) {
  load("namespace eval p { proc a {} { hbs::AddFile missing.vhd }; hbs::Register }", true);
  EXPECT_NO_THROW(s().run("p::a", {}));
}

TEST_F(Tree, Callbacks) {
  load(R"(namespace eval p {
  proc a {} {
    hbs::SetTool "vivado-prj"
    hbs::AddPostSynthCb myPostSynthCb
    hbs::AddPreCb implementation hbs::SetArgSuffix x
  }
  proc bad {} { hbs::AddPreCb nostage p }
  proc badtag {} { hbs::SetTool ghdl; hbs::AddPreSynthCb p }
  hbs::Register
})", true);
  s().run("p::a", {});
  const auto& post = s().context().callbacks_for("synthesis", Phase::post);
  ASSERT_EQ(post.size(), 1u);
  EXPECT_EQ(post[0].command.substr(post[0].command.rfind(':') + 1), "myPostSynthCb");
  const auto& pre = s().context().callbacks_for("implementation", Phase::pre);
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_EQ(pre[0].args, Strings{"x"});
  EXPECT_EQ(run_error(s(), "p::bad"), Errc::unknown_stage);
  EXPECT_EQ(run_error(s(), "p::badtag"), Errc::unknown_stage);
}

TEST_F(Tree, RunWithoutTool) {
  load("namespace eval p { proc a {} { hbs::Run }; hbs::Register }", true);
  EXPECT_EQ(run_error(s(), "p::a"), Errc::tool_not_set);
}

TEST_F(Tree, RunUnknownStage) {
  load("namespace eval p { proc a {} { hbs::SetTool mock-sim; hbs::Run nope }; hbs::Register }");
  EXPECT_EQ(run_error(s(), "p::a"), Errc::unknown_stage);
}

TEST_F(Tree, ExecDryRunPrintsAndSpawnsNothing) {
  load("namespace eval p { proc a {} { puts [hbs::Exec \"ghdl -e --std=08 --workdir=work tb_top\"] }; "
       "hbs::Register }",
       true);
  const auto before = spawn_count();
  s().run("p::a", {});
  EXPECT_EQ(spawn_count(), before);
  EXPECT_EQ(out(), "ghdl -e --std=08 --workdir=work tb_top\n0\n");
}

TEST_F(Tree, ExecReturnsExitCode) {
  load(R"(namespace eval p {
  proc ok {} { puts [hbs::Exec true] }
  proc three {} {
    set err [hbs::Exec sh -c "exit 3"]
    if {$err} { hbs::panic "elaboration failed with exit status $err" }
  }
  hbs::Register
})");
  s().run("p::ok", {});
  EXPECT_EQ(out(), "0\n");
  try {
    s().run("p::three", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::panic);
    EXPECT_STREQ(e.what(), "elaboration failed with exit status 3");
  }
}

TEST_F(Tree, BuildDirCreatedAndExposed) {
  load("namespace eval p { proc a {args} { puts $hbs::RunTargetBuildDir }; hbs::Register }");
  s().run("p::a", {});
  const fs::path dir = Session::build_dir_for(work.path(), "p::a", {});
  EXPECT_EQ(dir, work.path() / "build" / "p" / "a");
  EXPECT_TRUE(fs::is_directory(dir));
  EXPECT_EQ(out(), dir.string() + "\n");
  Strings x{"x"}, y{"y"};
  EXPECT_NE(Session::build_dir_for(work.path(), "p::a", x),
            Session::build_dir_for(work.path(), "p::a", y));
  EXPECT_EQ(Session::build_dir_for(work.path(), "p::a", x).parent_path(), dir);
}

TEST_F(Tree, DryRunLeavesNoBuildDir) {
  load("namespace eval p { proc a {} { exec touch made; puts hi }; hbs::Register }", true);
  s().run("p::a", {});
  EXPECT_FALSE(fs::exists(work / "build"));
  EXPECT_FALSE(fs::exists(work / "made"));
  EXPECT_EQ(out(), "touch made\nhi\n");
}

TEST_F(Tree, CallbackOrder) {
  load(R"(namespace eval p {
  proc a {} {
    hbs::SetTool mock-sim
    hbs::AddPreSimCb puts one
    hbs::AddPreSimCb puts two
    hbs::AddPreSimCb puts three
    hbs::AddPostSimCb puts four
    hbs::Run
  }
  hbs::Register
})");
  s().run("p::a", {});
  EXPECT_EQ(out(), "one\ntwo\nthree\nfour\n");
}

}  // namespace
