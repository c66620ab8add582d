#include "dmgsim/schedule.hpp"

#include <algorithm>
#include <ostream>

namespace dmgsim {

void BeaconIntervalLayout::validate() const
{
    if (bhi_duration == SimTime::zero()) {
        throw ScheduleError("BHI duration must be positive");
    }
    if (bhi_duration >= bi_duration) {
        throw ScheduleError("BHI duration must be shorter than the beacon interval");
    }
}

void AddtsRequest::validate() const
{
    if (period_divisor == 0) {
        throw std::invalid_argument("ADDTS request: period divisor must be >= 1");
    }
    if (max_duration == SimTime::zero()) {
        throw std::invalid_argument("ADDTS request: max duration must be positive");
    }
    if (min_duration > max_duration) {
        throw std::invalid_argument("ADDTS request: min duration exceeds max duration");
    }
}

const char* to_string(RejectReason r)
{
    switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::UnsupportedPeriod: return "unsupported period";
    case RejectReason::DurationExceedsPeriod: return "duration exceeds allocation period";
    case RejectReason::InsufficientDtiTime: return "insufficient DTI time";
    case RejectReason::NotApplicable: return "not applicable";
    }
    return "?";
}

const Allocation* DtiSchedule::find(AllocId id) const
{
    auto it = std::find_if(sp_allocations.begin(), sp_allocations.end(),
                           [id](const Allocation& a) { return a.id == id; });
    return it == sp_allocations.end() ? nullptr : &*it;
}

const Allocation* DtiSchedule::find_by_owner(StaId sta) const
{
    auto it = std::find_if(sp_allocations.begin(), sp_allocations.end(),
                           [sta](const Allocation& a) { return a.owner == sta; });
    return it == sp_allocations.end() ? nullptr : &*it;
}

namespace {

std::vector<Block> sorted_sp_blocks(const DtiSchedule& sched)
{
    std::vector<Block> blocks;
    for (const auto& a : sched.sp_allocations) {
        blocks.insert(blocks.end(), a.blocks.begin(), a.blocks.end());
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const Block& a, const Block& b) { return a.start < b.start; });
    return blocks;
}

bool placement_fits(const std::vector<Block>& existing, SimTime dti, std::uint32_t p,
                    SimTime period, SimTime s, SimTime d, SimTime guard)
{
    for (std::uint32_t i = 0; i < p; ++i) {
        const SimTime start = s + period * i;
        const SimTime end = start + d;
        if (end > dti) {
            return false;
        }
        for (const auto& b : existing) {
            const bool before = end + guard <= b.start;
            const bool after = start >= b.end() + guard;
            if (!before && !after) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

std::vector<Block> derive_cbap_gaps(const DtiSchedule& sched, const BeaconIntervalLayout& layout)
{
    const SimTime dti = layout.dti_duration();
    std::vector<Block> gaps;
    SimTime cursor;
    for (const auto& b : sorted_sp_blocks(sched)) {
        if (b.start > cursor) {
            gaps.push_back({cursor, b.start - cursor});
        }
        cursor = std::max(cursor, b.end());
    }
    if (cursor < dti) {
        gaps.push_back({cursor, dti - cursor});
    }
    return gaps;
}

std::optional<SimTime> find_first_block_start(const DtiSchedule& sched,
                                              const BeaconIntervalLayout& layout,
                                              std::uint32_t p, SimTime period, SimTime d,
                                              SimTime guard)
{
    const auto existing = sorted_sp_blocks(sched);
    std::vector<SimTime> candidates{SimTime::zero()};
    for (const auto& b : existing) {
        const SimTime edge = b.end() + guard;
        for (std::uint32_t i = 0; i < p; ++i) {
            const SimTime shift = period * i;
            if (edge >= shift) {
                candidates.push_back(edge - shift);
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (const SimTime s : candidates) {
        if (placement_fits(existing, layout.dti_duration(), p, period, s, d, guard)) {
            return s;
        }
    }
    return std::nullopt;
}

AdmitResult admit_periodic(const AddtsRequest& request, const DtiSchedule& sched,
                           const BeaconIntervalLayout& layout, SimTime guard, AllocId next_id)
{
    request.validate();
    AdmitResult result{{}, sched};
    auto reject = [&](RejectReason why) {
        result.response.status = AddtsStatus::Rejected;
        result.response.reason = why;
        return result;
    };

    const auto p = request.period_divisor;
    if (layout.bi_duration.count() % p != 0) {
        return reject(RejectReason::UnsupportedPeriod);
    }
    const SimTime period = layout.bi_duration / static_cast<SimTime::rep>(p);
    const SimTime d = request.max_duration;
    if (d > period) {
        return reject(RejectReason::DurationExceedsPeriod);
    }
    const auto s = find_first_block_start(sched, layout, p, period, d, guard);
    if (!s) {
        return reject(RejectReason::InsufficientDtiTime);
    }

    Allocation alloc;
    alloc.id = next_id;
    alloc.owner = request.sta;
    alloc.kind = AllocationKind::SP;
    alloc.period = period;
    alloc.pseudo_static = request.pseudo_static;
    for (std::uint32_t i = 0; i < p; ++i) {
        alloc.blocks.push_back({*s + period * i, d});
    }
    result.schedule.sp_allocations.push_back(std::move(alloc));
    result.schedule.cbap_gaps = derive_cbap_gaps(result.schedule, layout);

    result.response.status = AddtsStatus::Accepted;
    result.response.alloc_id = next_id;
    result.response.allocated_duration = d;
    result.response.first_block_start = *s;
    return result;
}

DtiSchedule reduce_allocation(AllocId id, SimTime new_duration, const DtiSchedule& sched,
                              const BeaconIntervalLayout& layout)
{
    DtiSchedule out = sched;
    auto it = std::find_if(out.sp_allocations.begin(), out.sp_allocations.end(),
                           [id](const Allocation& a) { return a.id == id; });
    if (it == out.sp_allocations.end()) {
        throw ScheduleError("reduce_allocation: unknown allocation " + std::to_string(id));
    }
    if (new_duration == SimTime::zero()) {
        throw ScheduleError("reduce_allocation: duration must stay positive");
    }
    for (auto& b : it->blocks) {
        if (new_duration > b.duration) {
            throw ScheduleError("reduce_allocation: increase is not supported");
        }
    }
    for (auto& b : it->blocks) {
        b.duration = new_duration;
    }
    out.cbap_gaps = derive_cbap_gaps(out, layout);
    return out;
}

DtiSchedule cbap_only_schedule(const BeaconIntervalLayout& layout)
{
    DtiSchedule sched;
    sched.cbap_gaps = {{SimTime::zero(), layout.dti_duration()}};
    return sched;
}

std::vector<DtiSegment> dti_segments(const DtiSchedule& sched)
{
    std::vector<DtiSegment> out;
    for (const auto& a : sched.sp_allocations) {
        for (const auto& b : a.blocks) {
            out.push_back({b, AllocationKind::SP, a.owner});
        }
    }
    for (const auto& g : sched.cbap_gaps) {
        out.push_back({g, AllocationKind::CBAP, kBroadcast});
    }
    std::sort(out.begin(), out.end(), [](const DtiSegment& a, const DtiSegment& b) {
        return a.block.start < b.block.start;
    });
    return out;
}

void write_schedule_csv(std::ostream& os, const DtiSchedule& sched)
{
    os << "alloc_id,owner,kind,block_index,start_ns,duration_ns\n";
    for (const auto& a : sched.sp_allocations) {
        for (std::size_t i = 0; i < a.blocks.size(); ++i) {
            os << a.id << ',' << a.owner << ",SP," << i << ',' << a.blocks[i].start.count() << ','
               << a.blocks[i].duration.count() << '\n';
        }
    }
    for (std::size_t i = 0; i < sched.cbap_gaps.size(); ++i) {
        os << "0,broadcast,CBAP," << i << ',' << sched.cbap_gaps[i].start.count() << ','
           << sched.cbap_gaps[i].duration.count() << '\n';
    }
}

Scheduler::Scheduler(BeaconIntervalLayout layout) : layout_(layout)
{
    layout_.validate();
    schedule_.cbap_gaps = derive_cbap_gaps(schedule_, layout_);
}

PeriodicScheduler::PeriodicScheduler(BeaconIntervalLayout layout, SimTime guard)
    : Scheduler(layout), guard_(guard)
{
}

AddtsResponse PeriodicScheduler::handle_addts(const AddtsRequest& request)
{
    auto result = admit_periodic(request, schedule_, layout_, guard_, next_id_);
    if (result.response.accepted()) {
        schedule_ = std::move(result.schedule);
        ++next_id_;
    } else {
        silent_.insert(request.sta);
    }
    return result.response;
}

void PeriodicScheduler::reduce(AllocId id, SimTime new_duration)
{
    schedule_ = reduce_allocation(id, new_duration, schedule_, layout_);
}

CbapOnlyScheduler::CbapOnlyScheduler(BeaconIntervalLayout layout) : Scheduler(layout)
{
    schedule_ = cbap_only_schedule(layout_);
}

AddtsResponse CbapOnlyScheduler::handle_addts(const AddtsRequest& request)
{
    request.validate();
    AddtsResponse r;
    r.status = AddtsStatus::Rejected;
    r.reason = RejectReason::NotApplicable;
    return r;
}

} // namespace dmgsim
