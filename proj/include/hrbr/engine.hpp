#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "hrbr/checksum.hpp"
#include "hrbr/dense.hpp"
#include "hrbr/dist_matrix.hpp"
#include "hrbr/kernels.hpp"
#include "hrbr/model.hpp"
#include "hrbr/schedule.hpp"
#include "hrbr/transform.hpp"

namespace hrbr {

enum class Strategy { None, AbftR, Hrbr };
enum class Outcome { Completed, Unrecoverable, Singular };

/// How a stop-and-wait recovery is charged: the plain recovery time t, or
/// its expectation t' under restart-on-interrupt.
enum class RecoveryCharge { Deterministic, Expected };

std::string_view to_string(Strategy s);
std::string_view to_string(Outcome o);
Strategy parse_strategy(std::string_view text);

/// Virtual time. `elapsed` is the foreground critical path; background work
/// hidden behind it is tracked in `overlapped` only.
struct SimClock {
  double compute = 0.0;
  double communicate = 0.0;
  double recovery = 0.0;
  double rebuild = 0.0;
  double recompute_solution = 0.0;
  double overlapped = 0.0;

  double elapsed() const { return compute + communicate + recovery + rebuild + recompute_solution; }
  friend bool operator==(const SimClock&, const SimClock&) = default;
};

struct PendingRebuild {
  std::size_t pcol = 0;
  double ready_at = 0.0;
};

struct EngineConfig {
  GridSpec grid;
  Strategy strategy = Strategy::Hrbr;
  FailureSchedule schedule;
  /// f, c, lambda, s and log_base drive the virtual clock; p and n are taken
  /// from the grid and matrix.
  CostModel cost;
  RecoveryCharge recovery_charge = RecoveryCharge::Deterministic;
  ExecPolicy policy = ExecPolicy::Serial;
};

struct EngineState;
using StepObserver = std::function<void(const EngineState&)>;

struct EngineState {
  DistMatrix dist;
  CodingMatrix coding;
  Strategy strategy = Strategy::Hrbr;
  CostModel cost;
  RecoveryCharge recovery_charge = RecoveryCharge::Deterministic;
  ExecPolicy policy = ExecPolicy::Serial;

  std::size_t step = 0;    // panels completed
  std::size_t panels = 0;  // ceil(n / nb)
  SimClock clock;
  std::vector<Replacement> replacements;
  TransformationMatrix transform;
  std::vector<PendingRebuild> rebuilds;
  std::size_t failures_injected = 0;
  double pivot_tol = 0.0;
  double initial_max_abs = 0.0;
  /// Status each Failed process had before it failed, keyed by process index.
  std::map<std::size_t, ProcStatus> failed_from;

  std::size_t spares_available() const { return dist.spare_columns().size(); }
  std::optional<double> rebuild_deadline() const;
  /// max |active data| / max |A|, at least 1.
  double growth_factor() const;
};

/// Scatters A and b, encodes the redundancy columns (when r > 0) and sets up
/// the clock.
EngineState make_state(const DenseMatrix& a, const DenseMatrix& b, const EngineConfig& config);

/// One panel of GEPP: pivot search on the panel's data columns, row swaps and
/// trailing updates applied to every live column including redundancy and
/// every rhs copy. Eliminated entries are stored as exact zeros (b is carried
/// along, so L is not needed afterwards). Throws SingularMatrix on a pivot
/// below tolerance.
void step_factor_update(EngineState& state);

/// Flushes the victim's block and rhs to NaN and marks it Failed.
void inject_failure(EngineState& state, const ProcCoord& victim);

/// Stop-and-wait recovery of one failed data process from a checksum column.
/// Charges the recovery clock. Throws ChecksumBroken / NoSpareAvailable.
void stopwait_recover(EngineState& state, const ProcCoord& failed);

/// Substitutes the whole process column `failed_pcol` with the first usable
/// redundancy column and keeps going. Columns not yet eliminated are recorded
/// as a transformation factor; finished rows of already eliminated columns
/// are rebuilt off the critical path. Retired and stale redundancy columns are
/// scheduled for background rebuild. Throws NoSpareAvailable.
void hot_replace(EngineState& state, std::size_t failed_pcol);

/// Schedules `pcol` to become a fresh redundancy column at now + t'/(s-1).
void background_rebuild(EngineState& state, std::size_t pcol);

/// Finishes every pending rebuild whose deadline has passed.
void complete_rebuilds(EngineState& state);

/// Back substitution on the active matrix; returns y (equal to x when no
/// replacement happened).
std::vector<double> back_substitute_state(EngineState& state);

/// x = T y, charging (8c+1) n / f per transformation factor.
std::vector<double> recover_solution(EngineState& state, std::span<const double> y);

struct RunReport {
  Outcome outcome = Outcome::Completed;
  Strategy strategy = Strategy::None;
  std::size_t n = 0;
  GridSpec grid;
  double scaled_residual = 0.0;
  std::size_t failures_injected = 0;
  std::size_t replacements = 0;
  SimClock clock;
  /// Fault-free time (compute + communicate) over elapsed.
  double measured_time_efficiency = 1.0;
  std::vector<double> solution;
};

struct RunHooks {
  StepObserver after_step;      // after every step_factor_update
  StepObserver after_failure;   // after each boundary that handled a failure
};

/// Drives the whole solve. The residual is measured against the original A, b.
RunReport run(const DenseMatrix& a, const DenseMatrix& b, const EngineConfig& config,
              const RunHooks& hooks = {});

}  // namespace hrbr
