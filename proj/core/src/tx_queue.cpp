#include "dmgsim/tx_queue.hpp"

#include <stdexcept>

namespace dmgsim {

bool TxQueue::enqueue(const Packet& p)
{
    if (bytes_ + p.size > capacity_) {
        ++dropped_;
        dropped_bytes_ += p.size;
        return false;
    }
    fifo_.push_back(p);
    bytes_ += p.size;
    return true;
}

void TxQueue::pop_front(std::size_t n)
{
    if (n > fifo_.size()) {
        throw std::logic_error("TxQueue::pop_front past end");
    }
    for (std::size_t i = 0; i < n; ++i) {
        bytes_ -= fifo_[i].size;
    }
    fifo_.erase(fifo_.begin(), fifo_.begin() + static_cast<std::ptrdiff_t>(n));
}

} // namespace dmgsim
