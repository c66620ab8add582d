#include <benchmark/benchmark.h>

#include "dmgsim/network.hpp"
#include "dmgsim/schedule.hpp"

using namespace dmgsim;

namespace {

void BM_EventQueue(benchmark::State& state)
{
    const auto n = state.range(0);
    for (auto _ : state) {
        Kernel k;
        std::int64_t fired = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            k.post(SimTime::ns((i * 7919) % 1'000'003), 0, EventKind::Generic, [&fired] { ++fired; });
        }
        k.run_until(SimTime::ms(2));
        benchmark::DoNotOptimize(fired);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EventQueue)->Arg(1'000)->Arg(100'000);

void BM_Admission(benchmark::State& state)
{
    const BeaconIntervalLayout layout;
    for (auto _ : state) {
        PeriodicScheduler s(layout, SimTime::zero());
        for (StaId sta = 0; sta < 32; ++sta) {
            const SimTime d = SimTime::us(1'500 + 100 * sta);
            const auto p = static_cast<std::uint32_t>(sta % 4 == 3 ? 4 : 1 + sta % 2);
            benchmark::DoNotOptimize(s.handle_addts({sta, p, d, d, true}));
        }
    }
}
BENCHMARK(BM_Admission);

void BM_AssembleAmpdu(benchmark::State& state)
{
    TxQueue q;
    for (std::uint32_t i = 0; i < 2'000; ++i) {
        q.enqueue({0, i, 1448, SimTime::zero()});
    }
    const MacTimingParams t;
    const auto mcs = dmg_sc_mcs(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_ampdu(q, t, SimTime::ms(5), mcs));
    }
}
BENCHMARK(BM_AssembleAmpdu);

void BM_SingleRun(benchmark::State& state)
{
    const auto configs = SchedulingConfig::all();
    NetworkConfig c;
    c.scheduling = configs[static_cast<std::size_t>(state.range(0))];
    c.traffic.burst_packets = burst_packets_for(0.5, 4, c.mcs, c.traffic.mean_period, c.traffic.packet_size);
    c.horizon = SimTime::s(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(c).kpi.avg_delay_s);
    }
    state.SetLabel(c.scheduling.name + ", eta=0.5, 1 s");
}
BENCHMARK(BM_SingleRun)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
