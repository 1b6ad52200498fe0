#pragma once

#include <cstdint>
#include <functional>

namespace leafcalc {

/// Worker cap: min(hardware threads, FOLIATED_LEFSCHETZ_THREADS if set).
int max_threads();

/// Runs fn(begin, end) on chunks of [0, count) across worker threads. The
/// callers write results into preallocated index-addressed storage, so the
/// outcome is independent of the schedule.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace leafcalc
