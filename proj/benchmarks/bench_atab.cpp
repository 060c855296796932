#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "atab/ata.hpp"
#include "atab/builders.hpp"
#include "atab/forest.hpp"
#include "atab/oracle.hpp"
#include "atab/tree.hpp"

using namespace atab;

namespace {

CheckConfig make_config(int k, std::vector<std::string> labels = {},
                        std::vector<std::pair<std::string, std::string>> pairs = {}) {
    CheckConfig cfg;
    cfg.lock_count = k;
    cfg.labels = std::move(labels);
    cfg.pairs = std::move(pairs);
    return cfg;
}

Node printer_tree() {
    return spawn(
        join(label_over("P", terminate_leaf())),
        spawn(acquire(1, label_over("P", release(1, terminate_leaf()))),
              acquire(1, label_over("P", release(1, terminate_leaf())))));
}

Node handover_tree() {
    return spawn(acquire(1, acquire(2, release(2, release(1, terminate_leaf())))),
                 acquire(2, acquire(1, release(1, release(2, terminate_leaf())))));
}

void BM_BuildFull(benchmark::State& state) {
    CheckConfig cfg = make_config(static_cast<int>(state.range(0)), {"A", "B"},
                                  {{"A", "B"}});
    for (auto _ : state) {
        Ata a = build_full(cfg);
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_BuildFull)->DenseRange(1, 8)->Unit(benchmark::kMicrosecond);

void BM_BuildForest(benchmark::State& state) {
    Node t = printer_tree();
    CheckConfig cfg = make_config(1, {"P"}, {{"P", "P"}});
    for (auto _ : state) {
        Forest f = build_forest(t, cfg);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_BuildForest)->Unit(benchmark::kMicrosecond);

void BM_EvaluateForest(benchmark::State& state) {
    CheckConfig cfg = make_config(1, {"P"}, {{"P", "P"}});
    Ata full = build_full(cfg);
    Forest f = build_forest(printer_tree(), cfg);
    for (auto _ : state) {
        Verdict v = evaluate(full, f.spine);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_EvaluateForest)->Unit(benchmark::kMicrosecond);

void BM_OracleSchedulable(benchmark::State& state) {
    Node t = handover_tree();
    for (auto _ : state) benchmark::DoNotOptimize(is_schedulable(t, 2));
}
BENCHMARK(BM_OracleSchedulable)->Unit(benchmark::kMicrosecond);

void BM_SerializeFull(benchmark::State& state) {
    CheckConfig cfg = make_config(4, {"A", "B"}, {{"A", "B"}});
    Ata full = build_full(cfg);
    for (auto _ : state) {
        std::string text = serialize(full);
        benchmark::DoNotOptimize(text);
    }
}
BENCHMARK(BM_SerializeFull)->Unit(benchmark::kMicrosecond);

void BM_ParseFull(benchmark::State& state) {
    CheckConfig cfg = make_config(4, {"A", "B"}, {{"A", "B"}});
    std::string text = serialize(build_full(cfg));
    for (auto _ : state) {
        Ata a = parse_ata(text);
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_ParseFull)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
