#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dmgsim/schedule.hpp"

using namespace dmgsim;

namespace {

BeaconIntervalLayout layout_with_dti(SimTime dti)
{
    BeaconIntervalLayout l;
    l.bhi_duration = l.bi_duration - dti;
    return l;
}

AddtsRequest req(StaId sta, std::uint32_t p, SimTime d)
{
    return AddtsRequest{sta, p, d, d, true};
}

std::vector<Block> all_sp_blocks(const DtiSchedule& s)
{
    std::vector<Block> out;
    for (const auto& a : s.sp_allocations) {
        out.insert(out.end(), a.blocks.begin(), a.blocks.end());
    }
    return out;
}

// Independent check: walk [0, dti) and verify SP blocks and gaps tile it.
void check_partition(const DtiSchedule& s, const BeaconIntervalLayout& l)
{
    std::vector<std::pair<Block, bool>> pieces;
    for (const auto& b : all_sp_blocks(s)) {
        pieces.emplace_back(b, true);
    }
    for (const auto& g : s.cbap_gaps) {
        pieces.emplace_back(g, false);
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.first.start < b.first.start; });
    SimTime cursor;
    bool prev_gap = false;
    for (const auto& [b, sp] : pieces) {
        REQUIRE(b.duration > SimTime::zero());
        CHECK(b.start == cursor);
        if (!sp) {
            CHECK_FALSE(prev_gap); // gaps are maximal
        }
        prev_gap = !sp;
        cursor = b.end();
    }
    CHECK(cursor == l.dti_duration());
}

void check_geometry(const DtiSchedule& s, const BeaconIntervalLayout& l)
{
    const auto blocks = all_sp_blocks(s);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        CHECK(blocks[i].end() <= l.dti_duration());
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            CHECK_FALSE(blocks[i].overlaps(blocks[j]));
        }
    }
    for (const auto& a : s.sp_allocations) {
        for (std::size_t i = 1; i < a.blocks.size(); ++i) {
            CHECK(a.blocks[i].start - a.blocks[i - 1].start == a.period);
        }
    }
}

// Brute force over every grid-aligned first-block offset.
struct PlacementOracle {
    BeaconIntervalLayout layout;
    SimTime grid;
    std::vector<Block> taken;

    std::optional<SimTime> admit(std::uint32_t p, SimTime d)
    {
        if (layout.bi_duration.count() % p != 0) {
            return std::nullopt;
        }
        const SimTime t = layout.bi_duration / p;
        if (d > t) {
            return std::nullopt;
        }
        for (SimTime s; s < layout.dti_duration(); s += grid) {
            bool ok = true;
            std::vector<Block> mine;
            for (std::uint32_t i = 0; i < p && ok; ++i) {
                const Block b{s + t * i, d};
                ok = b.end() <= layout.dti_duration();
                for (const auto& o : taken) {
                    ok = ok && !b.overlaps(o);
                }
                mine.push_back(b);
            }
            if (ok) {
                taken.insert(taken.end(), mine.begin(), mine.end());
                return s;
            }
        }
        return std::nullopt;
    }
};

} // namespace

TEST_SUITE("schedule")
{
    TEST_CASE("layout splits the BI into BHI and DTI")
    {
        BeaconIntervalLayout l;
        CHECK(l.dti_start() == l.bhi_duration);
        CHECK(l.dti_start() + l.dti_duration() == l.bi_duration);
        CHECK(l.dti_duration() == SimTime::us(100'400));
        l.bhi_duration = SimTime::zero();
        CHECK_THROWS_AS(l.validate(), ScheduleError);
        l.bhi_duration = l.bi_duration;
        CHECK_THROWS_AS(l.validate(), ScheduleError);
    }

    TEST_CASE("malformed ADDTS requests are rejected up front")
    {
        CHECK_THROWS_AS(AddtsRequest({0, 0, SimTime::ms(1), SimTime::ms(1), true}).validate(), std::invalid_argument);
        CHECK_THROWS_AS(AddtsRequest({0, 1, SimTime::ms(2), SimTime::ms(1), true}).validate(), std::invalid_argument);
        CHECK_THROWS_AS(AddtsRequest({0, 1, SimTime::zero(), SimTime::zero(), true}).validate(), std::invalid_argument);
    }

    TEST_CASE("first request in an empty DTI lands at offset 0")
    {
        const auto l = layout_with_dti(SimTime::ms(100));
        const auto r = admit_periodic(req(0, 1, SimTime::ms(20)), DtiSchedule{}, l);
        REQUIRE(r.response.accepted());
        CHECK(*r.response.first_block_start == SimTime::zero());
        CHECK(*r.response.allocated_duration == SimTime::ms(20));
        REQUIRE(r.schedule.sp_allocations.size() == 1);
        CHECK(r.schedule.sp_allocations[0].blocks == std::vector<Block>{{SimTime::zero(), SimTime::ms(20)}});
    }

    TEST_CASE("18 ms requests: five fit back to back in 100.4 ms, the sixth is rejected")
    {
        BeaconIntervalLayout l;
        PeriodicScheduler s(l);
        for (int i = 0; i < 5; ++i) {
            const auto r = s.handle_addts(req(i, 1, SimTime::ms(18)));
            REQUIRE(r.accepted());
            CHECK(*r.first_block_start == SimTime::ms(18) * i);
            CHECK_FALSE(s.is_silent(i));
        }
        const auto r6 = s.handle_addts(req(5, 1, SimTime::ms(18)));
        CHECK_FALSE(r6.accepted());
        CHECK(r6.reason == RejectReason::InsufficientDtiTime);
        CHECK(s.is_silent(5));
        CHECK(s.schedule().sp_allocations.size() == 5);
        REQUIRE(s.schedule().cbap_gaps.size() == 1);
        CHECK(s.schedule().cbap_gaps[0] == Block{SimTime::ms(90), SimTime::us(10'400)});
    }

    TEST_CASE("blocks longer than the allocation period are rejected")
    {
        BeaconIntervalLayout l;
        const auto r = admit_periodic(req(0, 4, SimTime::ms(30)), DtiSchedule{}, l);
        CHECK_FALSE(r.response.accepted());
        CHECK(r.response.reason == RejectReason::DurationExceedsPeriod);
        CHECK(r.schedule.sp_allocations.empty());
    }

    TEST_CASE("a divisor that does not split the BI evenly is unsupported")
    {
        BeaconIntervalLayout l; // 102.4 ms is not a multiple of 3 ns
        const auto r = admit_periodic(req(0, 3, SimTime::ms(1)), DtiSchedule{}, l);
        CHECK_FALSE(r.response.accepted());
        CHECK(r.response.reason == RejectReason::UnsupportedPeriod);
    }

    TEST_CASE("p=4 allocation gets exactly four blocks spaced T/4")
    {
        BeaconIntervalLayout l;
        const auto r = admit_periodic(req(0, 4, SimTime::ms(5)), DtiSchedule{}, l);
        REQUIRE(r.response.accepted());
        const auto& a = r.schedule.sp_allocations.at(0);
        REQUIRE(a.blocks.size() == 4);
        CHECK(a.period == SimTime::us(25'600));
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(a.blocks[i].start == SimTime::us(25'600) * static_cast<SimTime::rep>(i));
            CHECK(a.blocks[i].duration == SimTime::ms(5));
        }
    }

    TEST_CASE("gaps around a p=4 allocation match the interval complement")
    {
        BeaconIntervalLayout l;
        const auto r = admit_periodic(req(0, 4, SimTime::ms(5)), DtiSchedule{}, l);
        const std::vector<Block> expected{
            {SimTime::ms(5), SimTime::us(20'600)},
            {SimTime::us(30'600), SimTime::us(20'600)},
            {SimTime::us(56'200), SimTime::us(20'600)},
            {SimTime::us(81'800), SimTime::us(18'600)},
        };
        CHECK(derive_cbap_gaps(r.schedule, l) == expected);
        CHECK(r.schedule.cbap_gaps == expected);
    }

    TEST_CASE("no SPs leaves one gap covering the DTI")
    {
        const auto l = layout_with_dti(SimTime::ms(100));
        CHECK(derive_cbap_gaps(DtiSchedule{}, l) == std::vector<Block>{{SimTime::zero(), SimTime::ms(100)}});
    }

    TEST_CASE("adjacent SP blocks leave a single trailing gap")
    {
        const auto l = layout_with_dti(SimTime::ms(100));
        auto r = admit_periodic(req(0, 1, SimTime::ms(30)), DtiSchedule{}, l);
        r = admit_periodic(req(1, 1, SimTime::ms(30)), r.schedule, l, SimTime::zero(), 2);
        CHECK(all_sp_blocks(r.schedule)[1].start == SimTime::ms(30));
        CHECK(derive_cbap_gaps(r.schedule, l) == std::vector<Block>{{SimTime::ms(60), SimTime::ms(40)}});
    }

    TEST_CASE("reduce keeps block starts and opens a gap")
    {
        BeaconIntervalLayout l;
        PeriodicScheduler s(l);
        REQUIRE(s.handle_addts(req(0, 1, SimTime::ms(20))).accepted());
        REQUIRE(s.handle_addts(req(1, 1, SimTime::ms(20))).accepted());
        const auto before = s.schedule();

        s.reduce(1, SimTime::ms(20));
        CHECK(s.schedule().sp_allocations[0].blocks == before.sp_allocations[0].blocks);
        CHECK(s.schedule().cbap_gaps == before.cbap_gaps);

        s.reduce(1, SimTime::ms(12));
        CHECK(s.schedule().sp_allocations[0].blocks[0] == Block{SimTime::zero(), SimTime::ms(12)});
        CHECK(s.schedule().sp_allocations[1].blocks == before.sp_allocations[1].blocks);
        REQUIRE(s.schedule().cbap_gaps.size() == 2);
        CHECK(s.schedule().cbap_gaps[0] == Block{SimTime::ms(12), SimTime::ms(8)});
        check_partition(s.schedule(), l);

        CHECK_THROWS_AS(s.reduce(1, SimTime::ms(20)), ScheduleError);
        CHECK_THROWS_AS(s.reduce(1, SimTime::zero()), ScheduleError);
        CHECK_THROWS_AS(s.reduce(99, SimTime::ms(1)), ScheduleError);
    }

    TEST_CASE("freed time is reused by later requests without moving old blocks")
    {
        BeaconIntervalLayout l;
        PeriodicScheduler s(l);
        REQUIRE(s.handle_addts(req(0, 1, SimTime::ms(20))).accepted());
        REQUIRE(s.handle_addts(req(1, 1, SimTime::ms(20))).accepted());
        s.reduce(1, SimTime::ms(12));
        const auto r = s.handle_addts(req(2, 1, SimTime::ms(8)));
        REQUIRE(r.accepted());
        CHECK(*r.first_block_start == SimTime::ms(12));
        CHECK(s.schedule().sp_allocations[1].blocks[0].start == SimTime::ms(20));
        check_geometry(s.schedule(), l);
    }

    TEST_CASE("guard time separates adjacent blocks")
    {
        BeaconIntervalLayout l;
        PeriodicScheduler s(l, SimTime::us(10));
        REQUIRE(s.handle_addts(req(0, 1, SimTime::ms(10))).accepted());
        const auto r = s.handle_addts(req(1, 1, SimTime::ms(10)));
        REQUIRE(r.accepted());
        CHECK(*r.first_block_start == SimTime::us(10'010));
    }

    TEST_CASE("CBAP-only scheduler: whole DTI is contention, requests not applicable")
    {
        BeaconIntervalLayout l;
        CbapOnlyScheduler s(l);
        CHECK(s.schedule().sp_allocations.empty());
        CHECK(s.schedule().cbap_gaps == std::vector<Block>{{SimTime::zero(), l.dti_duration()}});
        CHECK(cbap_only_schedule(l).cbap_gaps == derive_cbap_gaps(DtiSchedule{}, l));
        const auto r = s.handle_addts(req(0, 1, SimTime::ms(5)));
        CHECK_FALSE(r.accepted());
        CHECK(r.reason == RejectReason::NotApplicable);
        CHECK_FALSE(s.is_silent(0));
        CHECK(s.contention_only());
    }

    TEST_CASE("schedule CSV dump lists SP blocks then gaps")
    {
        BeaconIntervalLayout l;
        PeriodicScheduler s(l);
        s.handle_addts(req(3, 2, SimTime::ms(10)));
        std::ostringstream os;
        write_schedule_csv(os, s.schedule());
        CHECK(os.str() ==
              "alloc_id,owner,kind,block_index,start_ns,duration_ns\n"
              "1,3,SP,0,0,10000000\n"
              "1,3,SP,1,51200000,10000000\n"
              "0,broadcast,CBAP,0,10000000,41200000\n"
              "0,broadcast,CBAP,1,61200000,39200000\n");
    }

    TEST_CASE("dti_segments interleaves SPs and gaps in time order")
    {
        BeaconIntervalLayout l;
        PeriodicScheduler s(l);
        s.handle_addts(req(0, 2, SimTime::ms(10)));
        const auto seg = dti_segments(s.schedule());
        REQUIRE(seg.size() == 4);
        CHECK(seg[0].kind == AllocationKind::SP);
        CHECK(seg[0].owner == 0);
        CHECK(seg[1].kind == AllocationKind::CBAP);
        CHECK(seg[2].kind == AllocationKind::SP);
        CHECK(seg[3].kind == AllocationKind::CBAP);
        for (std::size_t i = 1; i < seg.size(); ++i) {
            CHECK(seg[i - 1].block.end() == seg[i].block.start);
        }
    }

    TEST_CASE("admission agrees with brute-force placement on a 0.1 ms grid")
    {
        BeaconIntervalLayout l;
        l.bi_duration = SimTime::ms(24);
        l.bhi_duration = SimTime::ms(4); // DTI 20 ms
        const std::vector<std::uint32_t> divisors{1, 2, 3, 4, 6};
        std::mt19937_64 gen(20240611);
        int accepted = 0;
        int rejected = 0;
        for (int trial = 0; trial < 400; ++trial) {
            PeriodicScheduler sched(l);
            PlacementOracle oracle{l, SimTime::us(100), {}};
            const int n = 1 + static_cast<int>(gen() % 6);
            for (int k = 0; k < n; ++k) {
                const std::uint32_t p = divisors[gen() % divisors.size()];
                const SimTime t = l.bi_duration / p;
                const auto max_units = static_cast<std::uint64_t>(t.count() / 100'000);
                const SimTime d = SimTime::us(100) * static_cast<SimTime::rep>(1 + gen() % max_units);
                const auto got = sched.handle_addts(req(k, p, d));
                const auto want = oracle.admit(p, d);
                REQUIRE(got.accepted() == want.has_value());
                if (want) {
                    CHECK(*got.first_block_start == *want);
                    ++accepted;
                } else {
                    ++rejected;
                }
            }
            check_geometry(sched.schedule(), l);
            check_partition(sched.schedule(), l);
        }
        CHECK(accepted > 100);
        CHECK(rejected > 100);
    }

    TEST_CASE("random admit/reduce sequences keep geometry, partition and immutability")
    {
        BeaconIntervalLayout l;
        std::mt19937_64 gen(77);
        for (int trial = 0; trial < 200; ++trial) {
            PeriodicScheduler s(l);
            std::map<AllocId, std::vector<Block>> frozen;
            for (int step = 0; step < 12; ++step) {
                if (gen() % 4 == 0 && !s.schedule().sp_allocations.empty()) {
                    const auto& a = s.schedule().sp_allocations[gen() % s.schedule().sp_allocations.size()];
                    const SimTime d = a.blocks[0].duration;
                    const SimTime nd = SimTime::ns(1 + static_cast<SimTime::rep>(gen() % static_cast<std::uint64_t>(d.count())));
                    const AllocId id = a.id;
                    s.reduce(id, nd);
                    for (auto& b : frozen[id]) {
                        b.duration = nd;
                    }
                } else {
                    const std::uint32_t p = std::vector<std::uint32_t>{1, 2, 4, 8}[gen() % 4];
                    const SimTime t = l.bi_duration / p;
                    const SimTime d = SimTime::ns(1 + static_cast<SimTime::rep>(gen() % static_cast<std::uint64_t>(t.count() / 3)));
                    const auto r = s.handle_addts(req(step, p, d));
                    if (r.accepted()) {
                        const auto* a = s.schedule().find(*r.alloc_id);
                        REQUIRE(a != nullptr);
                        CHECK(a->blocks.size() == p);
                        frozen[a->id] = a->blocks;
                    }
                }
                for (const auto& [id, blocks] : frozen) {
                    CHECK(s.schedule().find(id)->blocks == blocks);
                }
                check_geometry(s.schedule(), l);
                check_partition(s.schedule(), l);
            }
        }
    }
}
