#include <benchmark/benchmark.h>

#include <random>

#include "pssi/complexity.hpp"
#include "pssi/partition.hpp"
#include "pssi/pipeline.hpp"

namespace {

void BM_Pssi(benchmark::State& state) {
  const int bins = static_cast<int>(state.range(0));
  const auto p = pssi::random_features(bins, 1);
  const auto q = pssi::random_features(bins, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pssi::pssi(p, q, 0.2));
  state.SetComplexityN(bins);
}
BENCHMARK(BM_Pssi)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_Bha(benchmark::State& state) {
  const int bins = static_cast<int>(state.range(0));
  const auto p = pssi::random_features(bins, 1);
  const auto q = pssi::random_features(bins, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pssi::bha(p, q));
  state.SetComplexityN(bins);
}
BENCHMARK(BM_Bha)->RangeMultiplier(2)->Range(8, 64)->Complexity();

pssi::SegmentGraph grid_graph(int side) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0, 1);
  pssi::SegmentGraph g(side * side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int v = r * side + c;
      if (c + 1 < side) g.add_edge(v, v + 1, pssi::Weight::finite(unit(rng)));
      if (r + 1 < side) g.add_edge(v, v + side, pssi::Weight::finite(unit(rng)));
    }
  }
  return pssi::attach_terminals(g, {{0}, {side * side - 1}});
}

void BM_MaxstCut(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto g = grid_graph(side);
  for (auto _ : state) {
    const auto cut = pssi::terminal_cut(pssi::max_spanning_tree(g), g);
    benchmark::DoNotOptimize(cut.removed_edge);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(side) * side);
}
BENCHMARK(BM_MaxstCut)->Arg(32)->Arg(64)->Arg(100)->Arg(141)->Complexity(benchmark::oNLogN);

void BM_SegmentImage(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  pssi::Image img(side, side);
  std::mt19937_64 rng(3);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const bool in = (r - side / 2) * (r - side / 2) + (c - side / 2) * (c - side / 2) < side * side / 10;
      for (int ch = 0; ch < 3; ++ch) {
        img.at(r, c)[ch] = static_cast<std::uint8_t>((in ? 180 : 60) + static_cast<int>(rng() % 16));
      }
    }
  }
  pssi::Scribbles s;
  s.fg_pixels = {{side / 2, side / 2}};
  s.bg_pixels = {{1, 1}};
  for (auto _ : state) {
    pssi::Session session(img, pssi::EngineConfig{});
    session.add_scribbles(s);
    benchmark::DoNotOptimize(session.run_cut().mask.bits.data());
  }
}
BENCHMARK(BM_SegmentImage)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
