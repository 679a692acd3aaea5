#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hbs/flow/session.hpp"
#include "hbs/tclish/output.hpp"

namespace fs = std::filesystem;

namespace {

// Layers of `width` targets; each target depends on every target of the next
// layer, so without memoization the call count grows as width^layers.
std::string dag_source(int layers, int width) {
  std::ostringstream src;
  src << "namespace eval dag {\n";
  for (int l = 0; l < layers; ++l) {
    for (int w = 0; w < width; ++w) {
      src << "  proc t" << l << "_" << w << " {} {\n";
      if (l + 1 < layers)
        for (int n = 0; n < width; ++n) src << "    hbs::AddDep dag::t" << l + 1 << "_" << n << "\n";
      src << "  }\n";
    }
  }
  src << "  hbs::Register\n}\n";
  return src.str();
}

void BM_MemoDag(benchmark::State& state) {
  const fs::path root = fs::temp_directory_path() / "hbs-bench-dag";
  fs::remove_all(root);
  fs::create_directories(root / "src");
  std::ofstream(root / "src" / "dag.hbs") << dag_source(static_cast<int>(state.range(0)), 4);

  hbs::tclish::NullSink sink;
  const std::vector<std::string> argv;
  for (auto _ : state) {
    hbs::flow::Session s(hbs::flow::SessionOptions{root / "src", root, true, {}}, sink);
    s.load();
    s.run("dag::t0_0", argv);
  }
  fs::remove_all(root);
}
BENCHMARK(BM_MemoDag)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_Graph(benchmark::State& state) {
  const fs::path root = fs::temp_directory_path() / "hbs-bench-graph";
  fs::remove_all(root);
  fs::create_directories(root / "src");
  std::ofstream(root / "src" / "dag.hbs") << dag_source(8, 4);

  hbs::tclish::NullSink sink;
  hbs::flow::Session s(hbs::flow::SessionOptions{root / "src", root, true, {}}, sink);
  s.load();
  const std::vector<std::string> argv;
  for (auto _ : state) benchmark::DoNotOptimize(s.graph("dag::t0_0", argv));
  fs::remove_all(root);
}
BENCHMARK(BM_Graph)->Unit(benchmark::kMicrosecond);

}  // namespace
