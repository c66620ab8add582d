#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dmgsim {

/// Simulated time in integer nanoseconds since simulation start.
///
/// Values are never negative. Every arithmetic operation is checked: an
/// overflow or a subtraction that would go below zero throws
/// std::overflow_error / std::underflow_error instead of wrapping.
class SimTime {
public:
    using rep = std::int64_t;

    constexpr SimTime() = default;

    static constexpr SimTime ns(rep v) { return SimTime(checked(v)); }
    static constexpr SimTime us(rep v) { return ns(mul(v, 1'000)); }
    static constexpr SimTime ms(rep v) { return ns(mul(v, 1'000'000)); }
    static constexpr SimTime s(rep v) { return ns(mul(v, 1'000'000'000)); }
    static constexpr SimTime zero() { return SimTime(); }
    static constexpr SimTime max() { return SimTime(std::numeric_limits<rep>::max()); }

    constexpr rep count() const { return ns_; }
    constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }
    constexpr double millis() const { return static_cast<double>(ns_) * 1e-6; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime(add(ns_, o.ns_)); }
    constexpr SimTime operator-(SimTime o) const
    {
        if (o.ns_ > ns_) {
            throw std::underflow_error("SimTime subtraction below zero");
        }
        return SimTime(ns_ - o.ns_);
    }
    constexpr SimTime operator*(rep k) const { return SimTime(checked(mul(ns_, k))); }
    constexpr rep operator/(SimTime o) const { return ns_ / o.ns_; }
    constexpr SimTime operator/(rep k) const { return SimTime(ns_ / k); }
    constexpr SimTime operator%(SimTime o) const { return SimTime(ns_ % o.ns_); }

    constexpr SimTime& operator+=(SimTime o) { return *this = *this + o; }
    constexpr SimTime& operator-=(SimTime o) { return *this = *this - o; }

    std::string to_string() const { return std::to_string(ns_) + "ns"; }

private:
    constexpr explicit SimTime(rep v) : ns_(v) {}

    static constexpr rep checked(rep v)
    {
        if (v < 0) {
            throw std::underflow_error("negative SimTime");
        }
        return v;
    }
    static constexpr rep add(rep a, rep b)
    {
        rep r{};
        if (__builtin_add_overflow(a, b, &r)) {
            throw std::overflow_error("SimTime addition overflow");
        }
        return r;
    }
    static constexpr rep mul(rep a, rep b)
    {
        rep r{};
        if (__builtin_mul_overflow(a, b, &r)) {
            throw std::overflow_error("SimTime multiplication overflow");
        }
        return r;
    }

    rep ns_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, SimTime t) { return os << t.count() << "ns"; }

/// Converts a non-negative duration in seconds to the nearest nanosecond.
SimTime from_seconds(double seconds);

/// 102.4 ms: beacon interval, application period and SP period all share it.
inline constexpr SimTime kDefaultPeriod = SimTime::us(102'400);

} // namespace dmgsim
