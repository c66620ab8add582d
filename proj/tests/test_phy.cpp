#include <doctest.h>

#include <stdexcept>

#include "dmgsim/network.hpp"
#include "dmgsim/phy.hpp"
#include "dmgsim/traffic.hpp"
#include "dmgsim/tx_queue.hpp"

using namespace dmgsim;

namespace {

TxQueue filled(std::size_t n, std::uint32_t size)
{
    TxQueue q;
    for (std::size_t i = 0; i < n; ++i) {
        q.enqueue({0, static_cast<std::uint32_t>(i), size, SimTime::zero()});
    }
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Hand-rolled airtime for draining b packets of `size` bytes with the default
// aggregation limits: whole A-MSDUs of k MSDUs, whole A-MPDUs of m MPDUs.
std::int64_t oracle_drain_ns(std::int64_t b, std::int64_t size, const MacTimingParams& t, std::int64_t rate)
{
    const std::int64_t msdu = size + t.per_msdu_overhead;
    const std::int64_t k = t.max_amsdu / msdu;
    const std::int64_t mpdu_full = k * msdu + t.per_mpdu_overhead;
    const std::int64_t m = t.max_ampdu / mpdu_full;
    const std::int64_t per_batch = k * m;
    const auto exchange = [&](std::int64_t psdu) {
        return t.preamble_header.count() + ceil_div(psdu * 8 * 1'000'000'000, rate) + t.sifs.count() +
               t.block_ack_duration.count();
    };
    std::int64_t total = (b / per_batch) * exchange(m * mpdu_full);
    const std::int64_t rest = b % per_batch;
    if (rest > 0) {
        const std::int64_t full_mpdus = rest / k;
        const std::int64_t tail = rest % k;
        std::int64_t psdu = full_mpdus * mpdu_full;
        if (tail > 0) {
            psdu += tail * msdu + t.per_mpdu_overhead;
        }
        total += exchange(psdu);
    }
    return total;
}

} // namespace

TEST_SUITE("phy")
{
    TEST_CASE("MCS table")
    {
        CHECK(dmg_sc_mcs(4).phy_rate_bps == 1'155'000'000);
        CHECK(dmg_sc_mcs(1).phy_rate_bps == 385'000'000);
        CHECK(dmg_sc_mcs(12).phy_rate_bps == 4'620'000'000);
        CHECK_THROWS(dmg_sc_mcs(0));
        CHECK_THROWS(dmg_sc_mcs(13));
    }

    TEST_CASE("empty payload costs exactly the preamble")
    {
        MacTimingParams t;
        CHECK(frame_tx_duration(0, dmg_sc_mcs(4), t) == t.preamble_header);
    }

    TEST_CASE("1448 B at 1155 Mb/s with no preamble takes 10030 ns")
    {
        MacTimingParams t;
        t.preamble_header = SimTime::zero();
        CHECK(frame_tx_duration(1448, dmg_sc_mcs(4), t) == SimTime::ns(10'030));
    }

    TEST_CASE("frame duration is monotone in payload size")
    {
        MacTimingParams t;
        const auto mcs = dmg_sc_mcs(4);
        SimTime prev = frame_tx_duration(0, mcs, t);
        for (std::uint64_t n = 1; n <= 10'000; ++n) {
            const SimTime cur = frame_tx_duration(n, mcs, t);
            REQUIRE(cur >= prev);
            REQUIRE(cur.count() == t.preamble_header.count() + ceil_div(static_cast<std::int64_t>(n) * 8'000, 1155));
            prev = cur;
        }
    }

    TEST_CASE("timing parameter validation")
    {
        MacTimingParams t;
        CHECK_NOTHROW(t.validate(1448));
        t.cw_min = 16;
        CHECK_THROWS(t.validate(1448));
        t.cw_min = 2047;
        CHECK_THROWS(t.validate(1448));
        t.cw_min = 0;
        t.cw_max = 0;
        CHECK_NOTHROW(t.validate(1448)); // 2^0 - 1
        t = MacTimingParams{};
        CHECK_THROWS(t.validate(8000)); // larger than max_amsdu
    }

    TEST_CASE("single packet with a generous budget is a batch of one")
    {
        MacTimingParams t;
        const auto q = filled(1, 1448);
        const auto b = assemble_ampdu(q, t, SimTime::ms(10), dmg_sc_mcs(4));
        CHECK(b.packets == 1);
        CHECK(b.payload_bytes == 1448);
        CHECK(b.psdu_bytes == 1448 + 36 + 32);
        CHECK(b.mpdus.size() == 1);
        CHECK(b.exchange == b.airtime + t.sifs + t.block_ack_duration);
    }

    TEST_CASE("1476 B MSDUs pack five per A-MSDU")
    {
        MacTimingParams t;
        const auto q = filled(1000, 1476 - t.per_msdu_overhead);
        const auto b = assemble_ampdu(q, t, SimTime::s(1), dmg_sc_mcs(4));
        // 5 * 1476 = 7380 <= 7935 < 6 * 1476, so a full MPDU is 7412 B. 35 of them
        // take 259420 B; a 36th MPDU fits one more MSDU (260928 B) but not two.
        REQUIRE(b.mpdus.size() == 36);
        for (std::size_t i = 0; i < 35; ++i) {
            CHECK(b.mpdus[i].end_packet == 5 * (i + 1));
            CHECK(b.mpdus[i].psdu_bytes_through == 7412 * (i + 1));
        }
        CHECK(b.mpdus[35].end_packet == 176);
        CHECK(b.packets == 176);
        CHECK(b.psdu_bytes == 260'928);
        CHECK(b.payload_bytes == 176 * 1440);
        CHECK(q.size() == 1000); // queue untouched
    }

    TEST_CASE("budget below the preamble yields an empty batch")
    {
        MacTimingParams t;
        const auto q = filled(10, 1448);
        CHECK(assemble_ampdu(q, t, SimTime::us(1), dmg_sc_mcs(4)).empty());
        CHECK(assemble_ampdu(q, t, t.preamble_header + t.sifs + t.block_ack_duration, dmg_sc_mcs(4)).empty());
        CHECK(assemble_ampdu(TxQueue{}, t, SimTime::s(1), dmg_sc_mcs(4)).empty());
    }

    TEST_CASE("batches never exceed their budget")
    {
        MacTimingParams t;
        const auto q = filled(400, 1448);
        for (std::int64_t us = 1; us < 4000; us += 7) {
            const auto b = assemble_ampdu(q, t, SimTime::us(us), dmg_sc_mcs(4));
            CHECK(b.exchange <= SimTime::us(us));
            if (!b.empty()) {
                // one more packet would not have fit
                const auto more = assemble_ampdu(filled(b.packets + 1, 1448), t, SimTime::s(1), dmg_sc_mcs(4));
                CHECK((more.exchange > SimTime::us(us) || more.packets == b.packets));
            }
        }
    }

    TEST_CASE("sp_duration_for matches the airtime summation oracle")
    {
        MacTimingParams t;
        const auto mcs = dmg_sc_mcs(4);
        CHECK(sp_duration_for(0, 1448, mcs, t) == SimTime::zero());
        for (std::int64_t b : {1, 2, 4, 5, 6, 10, 174, 175, 176, 349, 350, 351, 1277, 1768, 2043, 2298, 3000}) {
            CAPTURE(b);
            CHECK(sp_duration_for(static_cast<std::uint64_t>(b), 1448, mcs, t).count() ==
                  oracle_drain_ns(b, 1448, t, 1'155'000'000));
        }
    }

    TEST_CASE("the eta=0.5 burst keeps payload efficiency above 95%")
    {
        MacTimingParams t;
        const SimTime v = sp_duration_for(1277, 1448, dmg_sc_mcs(4), t);
        const double goodput = 8.0 * 1448 * 1277 / v.seconds();
        CHECK(goodput >= 0.95 * 1155e6);
        CHECK(goodput < 1155e6);
    }

    TEST_CASE("SP duration is additive up to one merged tail batch")
    {
        MacTimingParams t;
        const auto mcs = dmg_sc_mcs(4);
        // Two half-filled tail batches can merge into one: that saves one
        // exchange overhead and one MPDU header. Per-batch rounding is 1 ns.
        const SimTime merge = t.preamble_header + t.sifs + t.block_ack_duration +
                              payload_airtime(t.per_mpdu_overhead, mcs) + SimTime::ns(1);
        for (std::uint64_t n = 1; n <= 3000; ++n) {
            const SimTime d1 = sp_duration_for(n, 1448, mcs, t);
            const SimTime d2 = sp_duration_for(2 * n, 1448, mcs, t);
            REQUIRE(d2 <= d1 * 2 + SimTime::ns(1));
            REQUIRE(d2 + merge >= d1 * 2);
        }
    }

    TEST_CASE("fit exactly: a block of sp_duration_for(b) drains b packets and nothing more")
    {
        for (std::uint64_t b : {1u, 10u, 1277u, 2298u}) {
            CAPTURE(b);
            NetworkConfig c;
            c.n_stas = 1;
            c.scheduling = SchedulingConfig::sp2();
            c.traffic_enabled = false;
            c.traffic.burst_packets = b;
            c.horizon = c.layout.bi_duration - SimTime::ns(1);
            c.record_transmissions = true;
            c.queue_capacity_bytes = 10 * b * 1448;
            Network net(c);
            const SimTime sp_start = c.layout.dti_start();
            net.inject(0, b + 1, 1448, sp_start);
            const auto r = net.run();
            const SimTime d = sp_duration_for(b, 1448, c.mcs, c.timing);
            CHECK(r.sp_duration == d);
            CHECK(r.stations[0].delivered == b);
            CHECK(r.stations[0].queued == 1);
            SimTime last_end;
            for (const auto& e : r.tx_log) {
                last_end = e.time + e.airtime + c.timing.sifs + c.timing.block_ack_duration;
            }
            CHECK(last_end == sp_start + d);
        }
    }

    TEST_CASE("one and a half blocks of traffic leave exactly the tail for the next BI")
    {
        NetworkConfig c;
        c.n_stas = 1;
        c.scheduling = SchedulingConfig::sp2();
        c.traffic_enabled = false;
        c.traffic.burst_packets = 700;
        c.horizon = c.layout.bi_duration * 2 - SimTime::ns(1);
        c.record_packets = true;
        c.queue_capacity_bytes = 1'000'000'000;
        Network net(c);
        net.inject(0, 1050, 1448, c.layout.dti_start());
        const auto r = net.run();
        CHECK(r.stations[0].delivered == 1050);
        std::size_t first_bi = 0;
        for (const auto& rec : r.records) {
            REQUIRE(rec.delivered_at.has_value());
            if (*rec.delivered_at < c.layout.bi_duration) {
                ++first_bi;
            } else {
                CHECK(*rec.delivered_at >= c.layout.bi_duration + c.layout.dti_start());
            }
        }
        CHECK(first_bi == 700);
    }

    TEST_CASE("tx queue drops packets that overflow capacity and keeps FIFO order")
    {
        TxQueue q(3000);
        CHECK(q.enqueue({0, 0, 1448, SimTime::zero()}));
        CHECK(q.enqueue({0, 1, 1448, SimTime::zero()}));
        CHECK_FALSE(q.enqueue({0, 2, 1448, SimTime::zero()}));
        CHECK(q.enqueue({0, 3, 100, SimTime::zero()}));
        CHECK(q.dropped_packets() == 1);
        CHECK(q.dropped_bytes() == 1448);
        CHECK(q.byte_count() == 2996);
        CHECK(q[0].seq == 0);
        CHECK(q[2].seq == 3);
        q.pop_front(2);
        CHECK(q.front().seq == 3);
        CHECK_THROWS(q.pop_front(2));
    }
}
