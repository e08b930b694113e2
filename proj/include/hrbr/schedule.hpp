#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrbr/grid.hpp"

namespace hrbr {

/// Fail `victim` at the boundary before panel `step` (step == panel count is
/// the boundary after the last panel).
struct ScheduledFailure {
  std::size_t step = 0;
  ProcCoord victim;
};

/// Stochastic failures at system rate `rate` (failures per virtual second);
/// checked once per boundary, at most one victim per boundary.
struct PoissonFailures {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

struct FailureSchedule {
  std::vector<ScheduledFailure> scheduled;
  std::optional<PoissonFailures> poisson;

  bool empty() const { return scheduled.empty() && !poisson; }
};

/// Grammar: "" | "none" | STEP:PROW,PCOL[;STEP:PROW,PCOL...] | poisson:RATE:SEED.
/// Throws InvalidArgument with the offending token on malformed input.
FailureSchedule parse_schedule(std::string_view text);

std::string to_string(const FailureSchedule& schedule);

}  // namespace hrbr
