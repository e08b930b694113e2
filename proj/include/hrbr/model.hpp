#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

// Closed-form efficiency model for stop-and-wait algorithmic recovery and for
// hot replacement with background recovery on a p-processor machine.

namespace hrbr {

enum class LogBase { Two, Natural };

struct CostModel {
  double p = 1.0;       // processors
  double f = 1e9;       // flop/s per processor
  double c = 2.0;       // f divided by link bandwidth in bytes/s
  double lambda = 0.0;  // per-processor failure rate, 1/s
  double n = 1.0;       // matrix order
  double s = 3.0;       // background accelerator speedup
  LogBase log_base = LogBase::Two;
  /// When set, n is implied by n^2 = 0.04 p f and the closed exponential
  /// form of the recovery efficiency is used.
  bool memory_balanced = false;

  /// Per-processor MTTF. Infinite when lambda is zero.
  double mttf() const;
  /// n^2 = 0.04 p f when memory_balanced, otherwise n.
  double order() const;
  void validate() const;
};

double log_of(double x, LogBase base);

/// n for which a p-processor machine with f flop/s each holds the matrix: sqrt(0.04 p f).
double memory_balanced_order(double p, double f);

/// Time to rebuild one failed processor's data: (8c+1) n^2 Log(p) / (2 p f).
double recovery_time(const CostModel& cm);
/// Same cost for an explicit element count: (8c+1) elements Log(p) / (2 f).
double recovery_time_for_elements(double elements, const CostModel& cm);

/// Expected recovery time when recovery restarts after each interrupt:
/// (e^{lambda p t} - 1) / (lambda p) with t = recovery_time.
double expected_recovery_time(const CostModel& cm);
double expected_time_for(double t, const CostModel& cm);

double hardware_efficiency_recovery(double p);  // 1 - 1/sqrt(p)
double hardware_efficiency_hrbr(double p);      // 1 - 6/sqrt(p), floored at 0

/// (1 - 1/sqrt p) (M/p) / (M/p + t').
double eff_recovery_general(const CostModel& cm);
/// (1 - 1/sqrt p) exp(-0.02 (8c+1) lambda p Log p); valid under memory balance.
double eff_recovery_balanced(const CostModel& cm);
/// Balanced form when cm.memory_balanced, general form otherwise.
double eff_recovery(const CostModel& cm);

/// P(exactly k of p processors fail within t), binomial with 1 - e^{-lambda t}.
double prob_exactly_k(std::uint64_t p, double lambda, double t, std::uint64_t k);
/// P(more than k of p processors fail within t).
double prob_more_than_k_failures(std::uint64_t p, double lambda, double t, std::uint64_t k);

/// Speedup that lets one redundancy rebuild finish within one system MTTF:
/// exp(0.02 (8c+1) lambda p Log p).
double required_speedup(const CostModel& cm);
/// t'/(s-1): slow copy t'/s plus catch-up t'/(s(s-1)). Throws SpeedupTooSmall for s <= 1.
double rebuild_time(const CostModel& cm);

/// Cost of x = T y after a replacement: (8c+1) n / f.
double recompute_time(const CostModel& cm);
/// M / (M + 0.04 (8c+1) p^2 / n).
double time_efficiency_hrbr(const CostModel& cm);
/// 0.98 (1 - 6/sqrt p) M / (M + 0.04 (8c+1) p^2 / n).
double eff_hrbr(const CostModel& cm);

/// Completion probability with three redundancy columns and one rebuild per
/// system MTTF: 1 - P(more than 3 failures within M/p).
double hrbr_completion_probability(const CostModel& cm);
/// P(more than 3 failures within M/p).
double hrbr_failure_probability(const CostModel& cm);

/// Cost model whose failure rate puts the exponent 0.02 (8c+1) lambda p Log p
/// at exactly 1 for p = p_ref. All other fields keep their defaults.
CostModel reference_calibration(double c = 100.0, double p_ref = 1e6, LogBase base = LogBase::Two);

/// Smallest per-processor MTTF with eff_hrbr >= target for the given p, c, n.
double mttf_for_hrbr_efficiency(double target, double p, double c, double n);

enum class NRule { EqualP, TenP, HundredP };

struct CurveRow {
  double p = 0.0;
  double eff_recovery = 0.0;
  double eff_hrbr = 0.0;
  double s_required = 0.0;
  double prob_fail_window = 0.0;
};

/// One row per p. eff_recovery always uses the memory-balanced order; eff_hrbr
/// uses n from the rule.
std::vector<CurveRow> emit_curves(const CostModel& tmpl, const std::vector<double>& p_values,
                                  NRule rule);

/// Header `p,eff_recovery,eff_hrbr,s_required,prob_fail_window`, 17 significant digits.
void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curves_csv(std::istream& in);

}  // namespace hrbr
