#include "dmgsim/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace dmgsim {

SimTime from_seconds(double seconds)
{
    if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
        throw std::invalid_argument("from_seconds: value must be finite and non-negative");
    }
    return SimTime::ns(static_cast<SimTime::rep>(std::llround(seconds * 1e9)));
}

std::uint32_t Kernel::store(Stored s)
{
    if (!free_slots_.empty()) {
        auto idx = free_slots_.back();
        free_slots_.pop_back();
        slots_[idx] = std::move(s);
        return idx;
    }
    slots_.push_back(std::move(s));
    return static_cast<std::uint32_t>(slots_.size() - 1);
}

EventHandle Kernel::schedule(SimTime fire_at, EntityId target, EventKind kind,
                             std::function<void()> action)
{
    if (fire_at < clock_) {
        throw std::logic_error("Kernel::schedule: event at " + fire_at.to_string() +
                               " precedes clock " + clock_.to_string());
    }
    auto cancelled = std::make_shared<bool>(false);
    auto fired = std::make_shared<bool>(false);
    const auto seq = next_seq_++;
    const auto slot = store({Event{fire_at, seq, target, kind, std::move(action)}, cancelled, fired});
    queue_.push({fire_at, seq, slot});
    return EventHandle(std::move(cancelled), std::move(fired));
}

void Kernel::post(SimTime fire_at, EntityId target, EventKind kind, std::function<void()> action)
{
    if (fire_at < clock_) {
        throw std::logic_error("Kernel::post: event at " + fire_at.to_string() +
                               " precedes clock " + clock_.to_string());
    }
    const auto seq = next_seq_++;
    const auto slot = store({Event{fire_at, seq, target, kind, std::move(action)}, nullptr, nullptr});
    queue_.push({fire_at, seq, slot});
}

RunStats Kernel::run_until(SimTime end)
{
    std::uint64_t processed_here = 0;
    while (!queue_.empty() && queue_.top().fire_at <= end) {
        const auto top = queue_.top();
        queue_.pop();
        Stored s = std::move(slots_[top.slot]);
        slots_[top.slot] = Stored{};
        free_slots_.push_back(top.slot);
        if (s.cancelled && *s.cancelled) {
            continue;
        }
        clock_ = top.fire_at;
        if (s.fired) {
            *s.fired = true;
        }
        if (observer_) {
            observer_(s.event);
        }
        s.event.action();
        ++processed_here;
    }
    if (end > clock_) {
        clock_ = end;
    }
    processed_ += processed_here;
    return {processed_here, clock_};
}

} // namespace dmgsim
