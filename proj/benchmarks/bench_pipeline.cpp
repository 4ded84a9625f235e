#include "msunmix/abundance.hpp"
#include "msunmix/band_sim.hpp"
#include "msunmix/extraction.hpp"
#include "msunmix/io.hpp"
#include "msunmix/scene_gen.hpp"

#include <benchmark/benchmark.h>

using namespace msunmix;

namespace {

Scene make_scene(std::size_t side, std::size_t p) {
  SceneSpec s;
  s.width = side;
  s.height = side;
  s.p = p;
  s.seed = 1;
  return generate(s);
}

const SensitivityModel& camera() {
  static const SensitivityModel cam = io::read_curves(std::string(MSUNMIX_DATA_DIR) + "/cameras/synthetic_camera.csv");
  return cam;
}

void BM_Simulate(benchmark::State& state) {
  const Scene scene = make_scene(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_cube(scene.cube, camera()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.cube.pixel_count()));
}
BENCHMARK(BM_Simulate)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void extract_bench(benchmark::State& state, Method method, std::size_t max_iter) {
  const Scene scene = make_scene(static_cast<std::size_t>(state.range(0)), 4);
  const SpectralCube cube = simulate_cube(scene.cube, camera());
  ExtractionConfig c;
  c.p = 4;
  c.seed = 3;
  c.max_iter = max_iter;
  for (auto _ : state) benchmark::DoNotOptimize(extract(method, cube.data(), cube.axis(), c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cube.pixel_count()));
}

void BM_Vca(benchmark::State& state) { extract_bench(state, Method::vca, 1000); }
void BM_Nfindr(benchmark::State& state) { extract_bench(state, Method::nfindr, 1000); }
void BM_Nmf(benchmark::State& state) { extract_bench(state, Method::nmf, 200); }
BENCHMARK(BM_Vca)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Nfindr)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Nmf)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SolveCube(benchmark::State& state) {
  const Scene scene = make_scene(static_cast<std::size_t>(state.range(0)), 4);
  const SpectralCube cube = simulate_cube(scene.cube, camera());
  const EndmemberSet e = simulate_endmembers(scene.endmembers, camera());
  for (auto _ : state) benchmark::DoNotOptimize(solve_cube(cube, e, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cube.pixel_count()));
}
BENCHMARK(BM_SolveCube)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
