#include <benchmark/benchmark.h>

#include "birchmax/expsum.hpp"
#include "birchmax/forms.hpp"
#include "birchmax/lattice.hpp"
#include "birchmax/maxop.hpp"
#include "birchmax/multiplier.hpp"
#include "birchmax/oscillatory.hpp"
#include "birchmax/padic.hpp"

namespace {

const char* kDeskForm = "x1^2+x2^2+x3^2-x4^2-x5^2";

birchmax::Form desk() { return birchmax::Form::parse(kDeskForm); }

void BM_CountMeetInMiddle(benchmark::State& state) {
  birchmax::Form form = desk();
  long long radius = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        birchmax::lattice::count_points(form, radius, birchmax::lattice::EnumStrategy::MeetInMiddle));
  }
}
BENCHMARK(BM_CountMeetInMiddle)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_CountBruteForce(benchmark::State& state) {
  birchmax::Form form = desk();
  long long radius = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        birchmax::lattice::count_points(form, radius, birchmax::lattice::EnumStrategy::BruteForce));
  }
}
BENCHMARK(BM_CountBruteForce)->Arg(4)->Arg(8);

void BM_RadiusProfile(benchmark::State& state) {
  birchmax::Form form = desk();
  for (auto _ : state) {
    benchmark::DoNotOptimize(birchmax::lattice::radius_profile(form, state.range(0)));
  }
}
BENCHMARK(BM_RadiusProfile)->Arg(64)->Arg(128);

void BM_CompleteSumReference(benchmark::State& state) {
  birchmax::Form form = desk();
  long long q = state.range(0);
  auto spec = birchmax::expsum::ExpSumSpec::uniform(1, q, {1, 2, 0, 3, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(birchmax::expsum::complete_sum(form, spec));
  }
}
BENCHMARK(BM_CompleteSumReference)->Arg(8)->Arg(16)->Arg(24);

void BM_CompleteSumFast(benchmark::State& state) {
  birchmax::Form form = desk();
  long long q = state.range(0);
  auto spec = birchmax::expsum::ExpSumSpec::uniform(1, q, {1, 2, 0, 3, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(birchmax::expsum::complete_sum_fast(form, spec));
  }
}
BENCHMARK(BM_CompleteSumFast)->Arg(24)->Arg(60)->Arg(210);

void BM_ResidueCount(benchmark::State& state) {
  birchmax::Form form = desk();
  for (auto _ : state) {
    benchmark::DoNotOptimize(birchmax::padic::count_solutions_direct(form, state.range(0)));
  }
}
BENCHMARK(BM_ResidueCount)->Arg(32)->Arg(60)->Arg(128);

void BM_ExactMultiplier(benchmark::State& state) {
  birchmax::Form form = desk();
  birchmax::lattice::PointCloud cloud = birchmax::lattice::enumerate_points(form, state.range(0));
  birchmax::multiplier::TorusPoint xi =
      birchmax::multiplier::TorusPoint::reduce({0.13, -0.27, 0.41, 0.05, -0.33});
  for (auto _ : state) {
    benchmark::DoNotOptimize(birchmax::multiplier::exact_multiplier(cloud, xi));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(cloud.count()));
}
BENCHMARK(BM_ExactMultiplier)->Arg(8)->Arg(16)->Arg(32);

void BM_SurfaceTransform(benchmark::State& state) {
  birchmax::Form form = desk();
  birchmax::oscillatory::ShellSpec spec;
  spec.scale = 1;
  spec.eps = 0.2;
  spec.tol = 1e-3;
  double magnitude = static_cast<double>(state.range(0));
  std::vector<double> xi{magnitude, 0.3 * magnitude, 0.0, -0.2 * magnitude, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(birchmax::oscillatory::surface_transform(form, spec, xi));
  }
}
BENCHMARK(BM_SurfaceTransform)->Arg(0)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SparseAverage(benchmark::State& state) {
  birchmax::Form form = desk();
  birchmax::lattice::PointCloud cloud = birchmax::lattice::enumerate_points(form, 4);
  birchmax::maxop::GridFunction f = birchmax::maxop::GridFunction::delta(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(birchmax::maxop::apply_average(cloud, f));
  }
}
BENCHMARK(BM_SparseAverage);

}  // namespace

BENCHMARK_MAIN();
