#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmgsim/sim_time.hpp"

namespace dmgsim {

using StaId = std::int32_t;
using AllocId = std::uint32_t;

inline constexpr StaId kBroadcast = -1;

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// BI = BHI followed by DTI. The BHI is an opaque reserved interval.
struct BeaconIntervalLayout {
    SimTime bi_duration = kDefaultPeriod;
    SimTime bhi_duration = SimTime::ms(2);

    SimTime dti_start() const { return bhi_duration; }
    SimTime dti_duration() const { return bi_duration - bhi_duration; }

    /// Throws ScheduleError unless 0 < bhi < bi.
    void validate() const;
};

/// Half-open interval [start, start + duration), offsets relative to DTI start.
struct Block {
    SimTime start;
    SimTime duration;

    SimTime end() const { return start + duration; }
    bool overlaps(const Block& o) const { return start < o.end() && o.start < end(); }
    friend bool operator==(const Block&, const Block&) = default;
};

struct AddtsRequest {
    StaId sta = 0;
    /// Allocation period is bi_duration / period_divisor.
    std::uint32_t period_divisor = 1;
    SimTime min_duration;
    SimTime max_duration;
    bool pseudo_static = true;

    /// Throws std::invalid_argument when min > max, max == 0 or divisor == 0.
    void validate() const;
};

enum class AddtsStatus { Accepted, Rejected };

enum class RejectReason {
    None,
    UnsupportedPeriod,
    DurationExceedsPeriod,
    InsufficientDtiTime,
    NotApplicable,
};

const char* to_string(RejectReason r);

struct AddtsResponse {
    AddtsStatus status = AddtsStatus::Rejected;
    RejectReason reason = RejectReason::None;
    std::optional<AllocId> alloc_id;
    std::optional<SimTime> allocated_duration;
    std::optional<SimTime> first_block_start;

    bool accepted() const { return status == AddtsStatus::Accepted; }
};

enum class AllocationKind { SP, CBAP };

struct Allocation {
    AllocId id = 0;
    StaId owner = kBroadcast;
    AllocationKind kind = AllocationKind::SP;
    std::vector<Block> blocks;
    SimTime period;
    bool pseudo_static = true;
};

struct DtiSchedule {
    std::vector<Allocation> sp_allocations;
    /// Derived: exact complement of the SP blocks inside the DTI.
    std::vector<Block> cbap_gaps;

    const Allocation* find(AllocId id) const;
    const Allocation* find_by_owner(StaId sta) const;
};

/// Exact set complement of all SP blocks within [0, dti_duration), sorted
/// and maximal (adjacent free stretches are merged).
std::vector<Block> derive_cbap_gaps(const DtiSchedule& sched, const BeaconIntervalLayout& layout);

/// Smallest first-block offset s such that the blocks [s + i*t, s + i*t + d),
/// i = 0..p-1, fit in the DTI and keep `guard` clearance from every existing
/// SP block. Candidates are 0 and the guarded ends of existing blocks shifted
/// back by multiples of t.
std::optional<SimTime> find_first_block_start(const DtiSchedule& sched,
                                              const BeaconIntervalLayout& layout,
                                              std::uint32_t p, SimTime period, SimTime d,
                                              SimTime guard = SimTime::zero());

struct AdmitResult {
    AddtsResponse response;
    DtiSchedule schedule;
};

/// Periodic admission control. Accepts iff all p equally spaced blocks of
/// max_duration fit; placement is the smallest feasible offset. On reject
/// the returned schedule equals the input.
AdmitResult admit_periodic(const AddtsRequest& request, const DtiSchedule& sched,
                           const BeaconIntervalLayout& layout, SimTime guard = SimTime::zero(),
                           AllocId next_id = 1);

/// Shrinks every block of an allocation in place (start kept). Throws
/// ScheduleError for unknown ids, a zero duration or any increase.
DtiSchedule reduce_allocation(AllocId id, SimTime new_duration, const DtiSchedule& sched,
                              const BeaconIntervalLayout& layout);

/// Whole DTI as one broadcast CBAP, no SPs.
DtiSchedule cbap_only_schedule(const BeaconIntervalLayout& layout);

/// Contiguous piece of the DTI timeline: an SP block of one owner or a CBAP gap.
struct DtiSegment {
    Block block;
    AllocationKind kind = AllocationKind::CBAP;
    StaId owner = kBroadcast;
};

/// SP blocks and CBAP gaps merged into one sorted timeline.
std::vector<DtiSegment> dti_segments(const DtiSchedule& sched);

/// CSV rows: alloc_id,owner,kind,block_index,start_ns,duration_ns. CBAP gaps
/// appear as alloc_id 0 with owner "broadcast".
void write_schedule_csv(std::ostream& os, const DtiSchedule& sched);

/// PCP/AP scheduling policy. Requests are processed in call order.
class Scheduler {
public:
    explicit Scheduler(BeaconIntervalLayout layout);
    virtual ~Scheduler() = default;

    virtual AddtsResponse handle_addts(const AddtsRequest& request) = 0;
    virtual bool contention_only() const = 0;

    const BeaconIntervalLayout& layout() const { return layout_; }
    const DtiSchedule& schedule() const { return schedule_; }

    /// Rejected STAs stay silent for the rest of the run.
    bool is_silent(StaId sta) const { return silent_.contains(sta); }

protected:
    BeaconIntervalLayout layout_;
    DtiSchedule schedule_;
    std::set<StaId> silent_;
};

class PeriodicScheduler final : public Scheduler {
public:
    explicit PeriodicScheduler(BeaconIntervalLayout layout, SimTime guard = SimTime::zero());

    AddtsResponse handle_addts(const AddtsRequest& request) override;
    bool contention_only() const override { return false; }

    void reduce(AllocId id, SimTime new_duration);

    SimTime guard() const { return guard_; }

private:
    SimTime guard_;
    AllocId next_id_ = 1;
};

/// Allocates the entire DTI as CBAP. ADDTS requests are answered
/// "rejected, not applicable" but the STA keeps contending.
class CbapOnlyScheduler final : public Scheduler {
public:
    explicit CbapOnlyScheduler(BeaconIntervalLayout layout);

    AddtsResponse handle_addts(const AddtsRequest& request) override;
    bool contention_only() const override { return true; }
};

} // namespace dmgsim
