#include <benchmark/benchmark.h>

#include "qrt/problem_io.hpp"
#include "qrt/solver.hpp"

using namespace qrt;

namespace {

struct Setup {
    Problem prob;
    SolutionParams params;
    DoubleCover cover;
    std::vector<SheetedPoint> targets;
};

const Setup& setup() {
    static const Setup s = [] {
        Problem prob = load_problem(QRT_FIXTURE_DIR "/phi1.json");
        SolutionParams params = solve(prob.map, prob.p0, prob.cfg);
        DoubleCover cover(params.normalized, params.branch);
        // Targets along the closed-form orbit, in normalized coordinates.
        std::vector<SheetedPoint> targets;
        for (long n = 0; n < 32; ++n) {
            const ProjPoint p = apply_rho(params.rho, eval_solution(params, n));
            if (p.x.is_finite()) targets.push_back(p);
        }
        return Setup{prob, std::move(params), std::move(cover), std::move(targets)};
    }();
    return s;
}

void BM_eval_orbit_serial(benchmark::State& state) {
    const Setup& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(eval_orbit_serial(s.params, 0, state.range(0)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_eval_orbit_parallel(benchmark::State& state) {
    const Setup& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(eval_orbit(s.params, 0, state.range(0), true));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_abel_batch_serial(benchmark::State& state) {
    const Setup& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(abel_batch_serial(s.cover, s.params.basept, s.targets));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(s.targets.size()));
}

void BM_abel_batch_parallel(benchmark::State& state) {
    const Setup& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(abel_batch(s.cover, s.params.basept, s.targets, true));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(s.targets.size()));
}

}  // namespace

BENCHMARK(BM_eval_orbit_serial)->Arg(64)->Arg(1024);
BENCHMARK(BM_eval_orbit_parallel)->Arg(64)->Arg(1024);
BENCHMARK(BM_abel_batch_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_abel_batch_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
