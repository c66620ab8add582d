#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <vector>

#include "dmgsim/sim_time.hpp"

namespace dmgsim {

enum class EventKind : std::uint8_t {
    BurstGeneration,
    SegmentStart,
    SegmentEnd,
    BackoffSlot,
    TxEnd,
    AddtsRequest,
    AddtsResponse,
    Generic,
};

/// Entity an event is addressed to; -1 is the PCP/AP or the medium.
using EntityId = std::int32_t;
inline constexpr EntityId kCoordinator = -1;

struct Event {
    SimTime fire_at;
    std::uint64_t seq = 0;
    EntityId target = kCoordinator;
    EventKind kind = EventKind::Generic;
    std::function<void()> action;
};

/// Cancellation token returned by Kernel::schedule. Cancelling an event that
/// already fired is a no-op.
class EventHandle {
public:
    EventHandle() = default;

    void cancel()
    {
        if (cancelled_) {
            *cancelled_ = true;
        }
    }
    bool pending() const { return cancelled_ && !*cancelled_ && !*fired_; }

private:
    friend class Kernel;
    EventHandle(std::shared_ptr<bool> c, std::shared_ptr<bool> f)
        : cancelled_(std::move(c)), fired_(std::move(f)) {}

    std::shared_ptr<bool> cancelled_;
    std::shared_ptr<bool> fired_;
};

struct RunStats {
    std::uint64_t events_processed = 0;
    SimTime final_clock;
};

/// Single-threaded discrete-event engine. Events are totally ordered by
/// (fire_at, seq) where seq is the insertion counter.
class Kernel {
public:
    SimTime now() const { return clock_; }

    /// Throws std::logic_error if fire_at lies before the current clock.
    EventHandle schedule(SimTime fire_at, EntityId target, EventKind kind,
                         std::function<void()> action);

    /// Fire-and-forget variant without a cancellation handle.
    void post(SimTime fire_at, EntityId target, EventKind kind, std::function<void()> action);

    EventHandle schedule_in(SimTime delay, EntityId target, EventKind kind,
                            std::function<void()> action)
    {
        return schedule(clock_ + delay, target, kind, std::move(action));
    }

    /// Processes every event with fire_at <= end, then sets the clock to end.
    RunStats run_until(SimTime end);

    std::size_t pending_events() const { return queue_.size(); }

    /// Optional hook invoked before each event fires (used by trace tests).
    void set_observer(std::function<void(const Event&)> obs) { observer_ = std::move(obs); }

private:
    struct Entry {
        SimTime fire_at;
        std::uint64_t seq;
        std::uint32_t slot;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.fire_at != b.fire_at) {
                return a.fire_at > b.fire_at;
            }
            return a.seq > b.seq;
        }
    };
    struct Stored {
        Event event;
        std::shared_ptr<bool> cancelled;
        std::shared_ptr<bool> fired;
    };

    std::uint32_t store(Stored s);

    SimTime clock_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::vector<Stored> slots_;
    std::vector<std::uint32_t> free_slots_;
    std::function<void(const Event&)> observer_;
};

} // namespace dmgsim
