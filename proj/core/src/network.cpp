#include "dmgsim/network.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace dmgsim {

SchedulingConfig SchedulingConfig::cbap_only() { return {"CBAP-only", "cbap", Policy::CbapOnly, false, true}; }
SchedulingConfig SchedulingConfig::sp1() { return {"SP#1", "sp1", Policy::SpBased, true, true}; }
SchedulingConfig SchedulingConfig::sp2() { return {"SP#2", "sp2", Policy::SpBased, false, false}; }
SchedulingConfig SchedulingConfig::sp3() { return {"SP#3", "sp3", Policy::SpBased, false, true}; }

std::vector<SchedulingConfig> SchedulingConfig::all() { return {cbap_only(), sp1(), sp2(), sp3()}; }

SchedulingConfig SchedulingConfig::by_name(const std::string& name)
{
    std::string key;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (key == "cbap" || key == "cbaponly") {
        return cbap_only();
    }
    if (key == "sp1") {
        return sp1();
    }
    if (key == "sp2") {
        return sp2();
    }
    if (key == "sp3") {
        return sp3();
    }
    throw std::invalid_argument("unknown scheduling configuration '" + name +
                                "' (expected cbap, sp1, sp2 or sp3)");
}

const char* to_string(TxKind k)
{
    switch (k) {
    case TxKind::Sp: return "sp";
    case TxKind::Cbap: return "cbap";
    case TxKind::Collision: return "collision";
    case TxKind::Drop: return "drop";
    }
    return "?";
}

namespace {

struct Station {
    Station(StaId sta, std::uint64_t seed, std::uint64_t capacity)
        : id(sta),
          queue(capacity),
          start_rng(seed, "sta" + std::to_string(sta) + ".app-start"),
          period_seed(seed),
          backoff_rng(seed, "sta" + std::to_string(sta) + ".backoff")
    {
    }

    StaId id;
    TxQueue queue;
    RngStream start_rng;
    std::uint64_t period_seed;
    RngStream backoff_rng;
    std::optional<PeriodicBurstSource> source;

    bool silent = false;
    bool admitted = false;
    bool cbap_allowed = false;
    bool mgmt_pending = false;

    // shared by SP and CBAP: an exchange of this STA is on the air
    bool busy = false;

    bool in_sp = false;
    SimTime sp_end;

    std::uint32_t cw = 0;
    std::int64_t backoff = -1; // -1: no counter drawn
    std::uint32_t retries = 0;
    bool counting = false;
    SimTime count_start;
    bool deferred = false; // batch did not fit the rest of this gap

    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_retry = 0;
    std::uint64_t max_queue_bytes = 0;
};

struct AirFrame {
    Station* sta = nullptr;
    Batch batch;   // empty for management frames
    bool mgmt = false;
    SimTime airtime;
    std::uint64_t bytes = 0;
};

} // namespace

struct Network::Impl {
    explicit Impl(NetworkConfig c);

    void setup();
    void start_traffic(Station& st, std::optional<SimTime> first_sp, SimTime earliest);
    void on_burst(Station& st);
    void on_enqueued(Station& st);

    void on_bi_start(std::int64_t k);

    void on_sp_start(Station& st, SimTime end);
    void try_sp_tx(Station& st);
    void deliver(Station& st, const Batch& b, SimTime start);
    void after_exchange(Station& st);

    bool cbap_eligible(const Station& st) const;
    void on_gap_start(SimTime end);
    void on_gap_end();
    void cbap_reschedule();
    void cbap_resolve();
    void cbap_exchange_end(std::vector<AirFrame> frames);
    SimTime aifs_for(const Station& st) const;

    void late_join(Station& st);
    void admit(Station& st, const AddtsResponse& r, bool late);

    void log(SimTime t, StaId sta, TxKind kind, std::uint64_t bytes, SimTime airtime)
    {
        if (cfg.record_transmissions) {
            tx_log.push_back({t, sta, kind, bytes, airtime});
        }
    }

    Station& station(StaId id) { return *stations.at(static_cast<std::size_t>(id)); }

    NetworkConfig cfg;
    Kernel kernel;
    std::unique_ptr<Scheduler> scheduler;
    std::vector<std::unique_ptr<Station>> stations;
    KpiCollector collector;
    std::vector<TxLogEntry> tx_log;
    SimTime sp_duration;
    std::uint64_t collisions = 0;

    bool in_gap = false;
    SimTime gap_end;
    SimTime idle_since;
    bool medium_busy = false;
    EventHandle resolve_handle;
    std::optional<SimTime> resolve_at;
};

Network::Impl::Impl(NetworkConfig c) : cfg(std::move(c)), collector(cfg.record_packets)
{
    cfg.layout.validate();
    cfg.timing.validate(cfg.traffic.packet_size);
    if (cfg.n_stas == 0) {
        throw std::invalid_argument("network needs at least one STA");
    }
    if (cfg.late_stas > cfg.n_stas) {
        throw std::invalid_argument("late_stas exceeds n_stas");
    }
    if (cfg.traffic.burst_packets == 0) {
        throw std::invalid_argument("burst_packets must be >= 1");
    }
    if (cfg.horizon == SimTime::zero()) {
        throw std::invalid_argument("horizon must be positive");
    }
    cfg.traffic.smart_start = cfg.scheduling.smart_start;

    const std::uint64_t capacity =
        cfg.queue_capacity_bytes != 0
            ? cfg.queue_capacity_bytes
            : std::uint64_t{cfg.queue_periods} * cfg.traffic.burst_packets * cfg.traffic.packet_size;
    for (std::uint32_t i = 0; i < cfg.n_stas; ++i) {
        stations.push_back(std::make_unique<Station>(static_cast<StaId>(i), cfg.run_seed, capacity));
        stations.back()->cw = cfg.timing.cw_min;
    }

    if (cfg.scheduling.policy == Policy::CbapOnly) {
        scheduler = std::make_unique<CbapOnlyScheduler>(cfg.layout);
    } else {
        scheduler = std::make_unique<PeriodicScheduler>(cfg.layout, cfg.guard_time);
    }
    sp_duration = sp_duration_for(cfg.traffic.burst_packets, cfg.traffic.packet_size, cfg.mcs, cfg.timing);
    setup();
}

void Network::Impl::setup()
{
    const std::uint32_t initial = cfg.n_stas - cfg.late_stas;
    // Setup-phase ADDTS exchanges, ascending STA id.
    for (std::uint32_t i = 0; i < initial; ++i) {
        auto& st = *stations[i];
        const AddtsRequest req{st.id, 1, sp_duration, sp_duration, true};
        admit(st, scheduler->handle_addts(req), false);
    }
    for (std::uint32_t i = initial; i < cfg.n_stas; ++i) {
        auto* st = stations[i].get();
        if (cfg.late_join_at <= cfg.horizon) {
            kernel.post(cfg.late_join_at, st->id, EventKind::AddtsRequest, [this, st] { late_join(*st); });
        }
    }
    kernel.post(SimTime::zero(), kCoordinator, EventKind::Generic, [this] { on_bi_start(0); });
}

void Network::Impl::admit(Station& st, const AddtsResponse& r, bool late)
{
    const SimTime now = kernel.now();
    if (scheduler->contention_only()) {
        st.cbap_allowed = true;
        start_traffic(st, std::nullopt, late ? now : SimTime::zero());
        return;
    }
    if (!r.accepted()) {
        st.silent = true;
        return;
    }
    st.admitted = true;
    st.cbap_allowed = cfg.scheduling.cbap_fallback;
    // Allocations placed during the run take effect from the next BI.
    const SimTime bi = cfg.layout.bi_duration;
    const SimTime bi_start = late ? bi * (now / bi + 1) : SimTime::zero();
    const SimTime first_sp = bi_start + cfg.layout.dti_start() + *r.first_block_start;
    start_traffic(st, first_sp, late ? now : SimTime::zero());
}

void Network::Impl::start_traffic(Station& st, std::optional<SimTime> first_sp, SimTime earliest)
{
    if (!cfg.traffic_enabled) {
        return;
    }
    const SimTime t0 = app_start_time(cfg.traffic, first_sp, st.start_rng, earliest);
    st.source.emplace(static_cast<std::uint32_t>(st.id), cfg.traffic, t0,
                      RngStream(st.period_seed, "sta" + std::to_string(st.id) + ".period"));
    if (t0 <= cfg.horizon) {
        kernel.post(t0, st.id, EventKind::BurstGeneration, [this, s = &st] { on_burst(*s); });
    }
}

void Network::Impl::on_burst(Station& st)
{
    const SimTime now = kernel.now();
    st.source->emit(now, st.queue, [this, &st](const Packet& p, bool accepted) {
        ++st.generated;
        collector.on_generated(p);
        if (!accepted) {
            collector.on_lost(p, LossCause::Queue);
            log(kernel.now(), st.id, TxKind::Drop, p.size, SimTime::zero());
        }
    });
    st.max_queue_bytes = std::max(st.max_queue_bytes, st.queue.byte_count());
    const SimTime next = st.source->state().next_burst_at;
    if (next <= cfg.horizon) {
        kernel.post(next, st.id, EventKind::BurstGeneration, [this, s = &st] { on_burst(*s); });
    }
    on_enqueued(st);
}

void Network::Impl::on_enqueued(Station& st)
{
    if (st.busy) {
        return;
    }
    if (st.in_sp) {
        try_sp_tx(st);
    } else if (in_gap) {
        cbap_reschedule();
    }
}

void Network::Impl::on_bi_start(std::int64_t k)
{
    const SimTime bi_start = cfg.layout.bi_duration * k;
    const SimTime dti = bi_start + cfg.layout.dti_start();
    for (const auto& seg : dti_segments(scheduler->schedule())) {
        const SimTime start = dti + seg.block.start;
        const SimTime end = start + seg.block.duration;
        if (start > cfg.horizon) {
            continue;
        }
        if (seg.kind == AllocationKind::SP) {
            auto* st = &station(seg.owner);
            kernel.post(start, st->id, EventKind::SegmentStart, [this, st, end] { on_sp_start(*st, end); });
            kernel.post(end, st->id, EventKind::SegmentEnd, [st] { st->in_sp = false; });
        } else {
            kernel.post(start, kCoordinator, EventKind::SegmentStart, [this, end] { on_gap_start(end); });
            kernel.post(end, kCoordinator, EventKind::SegmentEnd, [this] { on_gap_end(); });
        }
    }
    const SimTime next = bi_start + cfg.layout.bi_duration;
    if (next <= cfg.horizon) {
        kernel.post(next, kCoordinator, EventKind::Generic, [this, k] { on_bi_start(k + 1); });
    }
}

void Network::Impl::on_sp_start(Station& st, SimTime end)
{
    st.in_sp = true;
    st.sp_end = end;
    if (!st.busy) {
        try_sp_tx(st);
    }
}

void Network::Impl::try_sp_tx(Station& st)
{
    const SimTime now = kernel.now();
    if (st.busy || !st.in_sp || st.queue.empty() || now >= st.sp_end) {
        return;
    }
    Batch b = assemble_ampdu(st.queue, cfg.timing, st.sp_end - now, cfg.mcs);
    if (b.empty()) {
        return;
    }
    st.busy = true;
    log(now, st.id, TxKind::Sp, b.psdu_bytes, b.airtime);
    const SimTime done = now + b.exchange;
    kernel.post(done, st.id, EventKind::TxEnd, [this, s = &st, b = std::move(b), now] {
        deliver(*s, b, now);
        s->busy = false;
        after_exchange(*s);
    });
}

void Network::Impl::deliver(Station& st, const Batch& b, SimTime start)
{
    std::size_t i = 0;
    for (const auto& m : b.mpdus) {
        const SimTime at = mpdu_end_time(start, m, cfg.mcs, cfg.timing);
        for (; i < m.end_packet; ++i) {
            collector.on_delivered(st.queue[i], at);
        }
    }
    st.delivered += b.packets;
    st.queue.pop_front(b.packets);
}

void Network::Impl::after_exchange(Station& st)
{
    if (st.in_sp) {
        try_sp_tx(st);
    } else if (in_gap) {
        cbap_reschedule();
    }
}

bool Network::Impl::cbap_eligible(const Station& st) const
{
    if (st.silent || st.busy || st.deferred || st.in_sp) {
        return false;
    }
    return st.mgmt_pending || (st.cbap_allowed && !st.queue.empty());
}

SimTime Network::Impl::aifs_for(const Station& st) const
{
    // management frames get one slot of priority
    return st.mgmt_pending ? cfg.timing.aifs - cfg.timing.slot : cfg.timing.aifs;
}

void Network::Impl::on_gap_start(SimTime end)
{
    in_gap = true;
    gap_end = end;
    idle_since = kernel.now();
    medium_busy = false;
    for (auto& st : stations) {
        st->deferred = false;
    }
    cbap_reschedule();
}

void Network::Impl::on_gap_end()
{
    const SimTime now = kernel.now();
    for (auto& st : stations) {
        if (st->counting) {
            if (now > st->count_start) {
                const auto elapsed = (now - st->count_start) / cfg.timing.slot;
                st->backoff = std::max<std::int64_t>(0, st->backoff - elapsed);
            }
            st->counting = false;
        }
    }
    resolve_handle.cancel();
    resolve_at.reset();
    in_gap = false;
}

void Network::Impl::cbap_reschedule()
{
    if (!in_gap || medium_busy) {
        return;
    }
    const SimTime now = kernel.now();
    const SimTime slot = cfg.timing.slot;
    std::optional<SimTime> earliest_fire;
    for (auto& p : stations) {
        auto& st = *p;
        if (!st.counting && cbap_eligible(st)) {
            if (st.backoff < 0) {
                st.backoff = st.backoff_rng.uniform_int(0, st.cw);
            }
            const SimTime aifs = aifs_for(st);
            const SimTime base = idle_since + aifs;
            const SimTime ready = std::max(now, idle_since) + aifs;
            if (ready <= base) {
                st.count_start = base;
            } else {
                const auto k = ((ready - base).count() + slot.count() - 1) / slot.count();
                st.count_start = base + slot * k;
            }
            st.counting = true;
        }
        if (st.counting) {
            const SimTime fire = st.count_start + slot * st.backoff;
            if (!earliest_fire || fire < *earliest_fire) {
                earliest_fire = fire;
            }
        }
    }
    if (!earliest_fire || *earliest_fire >= gap_end) {
        return;
    }
    if (resolve_at && *resolve_at <= *earliest_fire) {
        return;
    }
    resolve_handle.cancel();
    resolve_at = *earliest_fire;
    resolve_handle = kernel.schedule(*earliest_fire, kCoordinator, EventKind::BackoffSlot,
                                     [this] { cbap_resolve(); });
}

void Network::Impl::cbap_resolve()
{
    resolve_at.reset();
    const SimTime f = kernel.now();
    const SimTime slot = cfg.timing.slot;
    const SimTime budget = gap_end - f;

    std::vector<AirFrame> frames;
    std::vector<Station*> firing;
    for (auto& p : stations) {
        if (p->counting && p->count_start + slot * p->backoff == f) {
            firing.push_back(p.get());
        }
    }
    for (Station* st : firing) {
        st->counting = false;
        st->backoff = 0;
        AirFrame fr;
        fr.sta = st;
        if (st->mgmt_pending) {
            fr.mgmt = true;
            fr.bytes = cfg.mgmt_frame_bytes;
            fr.airtime = frame_tx_duration(fr.bytes, cfg.mcs, cfg.timing);
            if (fr.airtime + cfg.timing.sifs + cfg.timing.block_ack_duration > budget) {
                st->deferred = true;
                continue;
            }
        } else {
            fr.batch = assemble_ampdu(st->queue, cfg.timing, budget, cfg.mcs);
            if (fr.batch.empty()) {
                st->deferred = true;
                continue;
            }
            fr.bytes = fr.batch.psdu_bytes;
            fr.airtime = fr.batch.airtime;
        }
        frames.push_back(std::move(fr));
    }
    if (frames.empty()) {
        cbap_reschedule();
        return;
    }

    // Everyone else freezes with the slots already counted.
    for (auto& p : stations) {
        if (p->counting) {
            if (f > p->count_start) {
                p->backoff -= (f - p->count_start) / slot;
            }
            p->counting = false;
        }
    }

    SimTime longest;
    const bool collision = frames.size() > 1;
    for (auto& fr : frames) {
        fr.sta->busy = true;
        longest = std::max(longest, fr.airtime);
        log(f, fr.sta->id, collision ? TxKind::Collision : TxKind::Cbap, fr.bytes, fr.airtime);
    }
    if (collision) {
        ++collisions;
    }
    medium_busy = true;
    const SimTime end = f + longest + cfg.timing.sifs + cfg.timing.block_ack_duration;
    kernel.post(end, kCoordinator, EventKind::TxEnd,
                [this, frames = std::move(frames)]() mutable { cbap_exchange_end(std::move(frames)); });
}

void Network::Impl::cbap_exchange_end(std::vector<AirFrame> frames)
{
    const SimTime now = kernel.now();
    if (frames.size() == 1) {
        auto& fr = frames.front();
        Station& st = *fr.sta;
        const SimTime tx_start = now - fr.airtime - cfg.timing.sifs - cfg.timing.block_ack_duration;
        if (fr.mgmt) {
            st.mgmt_pending = false;
            const AddtsRequest req{st.id, 1, sp_duration, sp_duration, true};
            admit(st, scheduler->handle_addts(req), true);
        } else {
            deliver(st, fr.batch, tx_start);
        }
        st.cw = cfg.timing.cw_min;
        st.retries = 0;
        st.backoff = -1;
    } else {
        for (auto& fr : frames) {
            Station& st = *fr.sta;
            ++st.retries;
            if (st.retries >= cfg.timing.retry_limit) {
                if (!fr.mgmt) {
                    for (std::size_t i = 0; i < fr.batch.packets; ++i) {
                        collector.on_lost(st.queue[i], LossCause::Retry);
                    }
                    log(now, st.id, TxKind::Drop, fr.batch.payload_bytes, SimTime::zero());
                    st.queue.pop_front(fr.batch.packets);
                    st.dropped_retry += fr.batch.packets;
                }
                st.retries = 0;
                st.cw = cfg.timing.cw_min;
            } else {
                st.cw = std::min(2 * st.cw + 1, cfg.timing.cw_max);
            }
            st.backoff = -1;
        }
    }
    medium_busy = false;
    idle_since = now;
    for (auto& fr : frames) {
        fr.sta->busy = false;
    }
    for (auto& fr : frames) {
        if (fr.sta->in_sp) {
            try_sp_tx(*fr.sta);
        }
    }
    cbap_reschedule();
}

void Network::Impl::late_join(Station& st)
{
    if (scheduler->contention_only()) {
        const AddtsRequest req{st.id, 1, sp_duration, sp_duration, true};
        admit(st, scheduler->handle_addts(req), true);
        return;
    }
    st.mgmt_pending = true;
    if (in_gap) {
        cbap_reschedule();
    }
}

Network::Network(NetworkConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
Network::~Network() = default;

Kernel& Network::kernel() { return impl_->kernel; }
const Scheduler& Network::scheduler() const { return *impl_->scheduler; }
const NetworkConfig& Network::config() const { return impl_->cfg; }

std::uint32_t Network::contention_window(StaId sta) const { return impl_->station(sta).cw; }

void Network::inject(StaId sta, std::size_t count, std::uint32_t size, SimTime at)
{
    auto* st = &impl_->station(sta);
    impl_->kernel.post(at, sta, EventKind::BurstGeneration, [this, st, count, size] {
        auto& im = *impl_;
        for (std::size_t i = 0; i < count; ++i) {
            const Packet p{static_cast<std::uint32_t>(st->id), static_cast<std::uint32_t>(st->generated),
                           size, im.kernel.now()};
            ++st->generated;
            im.collector.on_generated(p);
            if (!st->queue.enqueue(p)) {
                im.collector.on_lost(p, LossCause::Queue);
            }
        }
        st->max_queue_bytes = std::max(st->max_queue_bytes, st->queue.byte_count());
        im.on_enqueued(*st);
    });
}

RunResult Network::run()
{
    auto& im = *impl_;
    RunResult r;
    r.stats = im.kernel.run_until(im.cfg.horizon);

    std::uint32_t generating = 0;
    for (const auto& p : im.stations) {
        const Station& st = *p;
        StationReport rep;
        rep.sta = st.id;
        rep.admitted = st.admitted;
        rep.silent = st.silent;
        rep.generating = st.source.has_value();
        if (st.source) {
            rep.t0 = st.source->state().t0;
            rep.bursts_emitted = st.source->state().bursts_emitted;
            ++generating;
        }
        rep.generated = st.generated;
        rep.delivered = st.delivered;
        rep.queued = st.queue.size();
        rep.dropped_queue = st.queue.dropped_packets();
        rep.dropped_retry = st.dropped_retry;
        rep.final_cw = st.cw;
        rep.max_queue_bytes = st.max_queue_bytes;
        if (rep.generated != rep.delivered + rep.queued + rep.dropped_queue + rep.dropped_retry) {
            throw std::logic_error("conservation violated for STA " + std::to_string(st.id));
        }
        r.stations.push_back(rep);
    }
    r.kpi = im.collector.finish(im.cfg.horizon, generating);
    r.tx_log = std::move(im.tx_log);
    if (im.cfg.record_packets) {
        r.records = im.collector.records();
    }
    r.schedule = im.scheduler->schedule();
    r.sp_duration = im.sp_duration;
    r.burst_packets = im.cfg.traffic.burst_packets;
    r.collisions = im.collisions;
    return r;
}

RunResult simulate(const NetworkConfig& cfg)
{
    Network net(cfg);
    return net.run();
}

} // namespace dmgsim
