#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>

#include "dmgsim/sim_time.hpp"

namespace dmgsim {

struct Packet {
    std::uint32_t flow = 0;
    std::uint32_t seq = 0;
    std::uint32_t size = 0; ///< application payload bytes
    SimTime generated_at;
};

/// Bounded FIFO of application packets. Capacity counts payload bytes.
class TxQueue {
public:
    explicit TxQueue(std::uint64_t capacity_bytes = UINT64_MAX) : capacity_(capacity_bytes) {}

    /// Appends if the packet fits, otherwise counts a drop and returns false.
    bool enqueue(const Packet& p);

    /// Removes the first n packets (n <= size()).
    void pop_front(std::size_t n);

    const Packet& operator[](std::size_t i) const { return fifo_[i]; }
    const Packet& front() const { return fifo_.front(); }
    std::size_t size() const { return fifo_.size(); }
    bool empty() const { return fifo_.empty(); }
    std::uint64_t byte_count() const { return bytes_; }
    std::uint64_t capacity_bytes() const { return capacity_; }
    std::uint64_t dropped_packets() const { return dropped_; }
    std::uint64_t dropped_bytes() const { return dropped_bytes_; }

private:
    std::deque<Packet> fifo_;
    std::uint64_t capacity_;
    std::uint64_t bytes_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t dropped_bytes_ = 0;
};

} // namespace dmgsim
