#include "hrbr/model.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hrbr/error.hpp"

namespace hrbr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// 0.02 (8c+1) lambda p Log p, the exponent shared by the balanced recovery
// efficiency and the required speedup.
double balanced_exponent(const CostModel& cm) {
  return 0.02 * (8.0 * cm.c + 1.0) * cm.lambda * cm.p * log_of(cm.p, cm.log_base);
}
}  // namespace

double CostModel::mttf() const { return lambda > 0.0 ? 1.0 / lambda : kInf; }

double CostModel::order() const { return memory_balanced ? memory_balanced_order(p, f) : n; }

void CostModel::validate() const {
  if (!(p >= 1.0)) throw InvalidArgument("p must be >= 1");
  if (!(f > 0.0)) throw InvalidArgument("f must be positive");
  if (!(c >= 0.0)) throw InvalidArgument("c must be non-negative");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  if (!memory_balanced && !(n >= 1.0)) throw InvalidArgument("n must be >= 1");
  if (!(s > 0.0)) throw InvalidArgument("s must be positive");
}

double log_of(double x, LogBase base) {
  return base == LogBase::Two ? std::log2(x) : std::log(x);
}

double memory_balanced_order(double p, double f) { return std::sqrt(0.04 * p * f); }

double recovery_time_for_elements(double elements, const CostModel& cm) {
  return (8.0 * cm.c + 1.0) * elements * log_of(cm.p, cm.log_base) / (2.0 * cm.f);
}

double recovery_time(const CostModel& cm) {
  const double n = cm.order();
  return recovery_time_for_elements(n * n / cm.p, cm);
}

double expected_time_for(double t, const CostModel& cm) {
  const double rate = cm.lambda * cm.p;
  if (rate == 0.0) return t;
  return std::expm1(rate * t) / rate;
}

double expected_recovery_time(const CostModel& cm) {
  return expected_time_for(recovery_time(cm), cm);
}

double hardware_efficiency_recovery(double p) { return 1.0 - 1.0 / std::sqrt(p); }

double hardware_efficiency_hrbr(double p) { return std::max(0.0, 1.0 - 6.0 / std::sqrt(p)); }

double eff_recovery_general(const CostModel& cm) {
  const double hw = hardware_efficiency_recovery(cm.p);
  if (cm.lambda == 0.0) return hw;
  const double window = cm.mttf() / cm.p;
  return hw * window / (window + expected_recovery_time(cm));
}

double eff_recovery_balanced(const CostModel& cm) {
  return hardware_efficiency_recovery(cm.p) * std::exp(-balanced_exponent(cm));
}

double eff_recovery(const CostModel& cm) {
  return cm.memory_balanced ? eff_recovery_balanced(cm) : eff_recovery_general(cm);
}

namespace {

boost::math::binomial_distribution<double> failures_within(std::uint64_t p, double lambda, double t) {
  // each processor fails within t with probability 1 - e^{-lambda t}
  return {static_cast<double>(p), -std::expm1(-lambda * t)};
}

}  // namespace

double prob_exactly_k(std::uint64_t p, double lambda, double t, std::uint64_t k) {
  if (k > p) return 0.0;
  if (lambda == 0.0 || t == 0.0) return k == 0 ? 1.0 : 0.0;
  return boost::math::pdf(failures_within(p, lambda, t), static_cast<double>(k));
}

double prob_more_than_k_failures(std::uint64_t p, double lambda, double t, std::uint64_t k) {
  if (p == 0) throw InvalidArgument("p must be >= 1");
  if (k >= p || lambda == 0.0 || t == 0.0) return 0.0;
  // The complement is evaluated directly, so small tails keep full precision.
  return boost::math::cdf(boost::math::complement(failures_within(p, lambda, t), static_cast<double>(k)));
}

double required_speedup(const CostModel& cm) { return std::exp(balanced_exponent(cm)); }

double rebuild_time(const CostModel& cm) {
  if (!(cm.s > 1.0)) throw SpeedupTooSmall("speedup must exceed 1, got " + std::to_string(cm.s));
  if (std::isinf(cm.s)) return 0.0;
  return expected_recovery_time(cm) / (cm.s - 1.0);
}

double recompute_time(const CostModel& cm) { return (8.0 * cm.c + 1.0) * cm.order() / cm.f; }

double time_efficiency_hrbr(const CostModel& cm) {
  if (cm.lambda == 0.0) return 1.0;
  const double m = cm.mttf();
  return m / (m + 0.04 * (8.0 * cm.c + 1.0) * cm.p * cm.p / cm.order());
}

double eff_hrbr(const CostModel& cm) {
  return 0.98 * hardware_efficiency_hrbr(cm.p) * time_efficiency_hrbr(cm);
}

double hrbr_failure_probability(const CostModel& cm) {
  if (cm.lambda == 0.0) return 0.0;
  const auto p = static_cast<std::uint64_t>(std::llround(cm.p));
  return prob_more_than_k_failures(p, cm.lambda, cm.mttf() / cm.p, 3);
}

double hrbr_completion_probability(const CostModel& cm) {
  return 1.0 - hrbr_failure_probability(cm);
}

CostModel reference_calibration(double c, double p_ref, LogBase base) {
  CostModel cm;
  cm.c = c;
  cm.p = p_ref;
  cm.log_base = base;
  cm.memory_balanced = true;
  cm.lambda = 1.0 / (0.02 * (8.0 * c + 1.0) * p_ref * log_of(p_ref, base));
  return cm;
}

double mttf_for_hrbr_efficiency(double target, double p, double c, double n) {
  const double h = 0.98 * hardware_efficiency_hrbr(p);
  if (target >= h) return kInf;
  const double k = 0.04 * (8.0 * c + 1.0) * p * p / n;
  return target * k / (h - target);
}

std::vector<CurveRow> emit_curves(const CostModel& tmpl, const std::vector<double>& p_values,
                                  NRule rule) {
  if (p_values.empty()) throw InvalidArgument("no p values");
  std::vector<CurveRow> rows;
  rows.reserve(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (i > 0 && !(p_values[i] > p_values[i - 1])) {
      throw InvalidArgument("p values must be strictly ascending");
    }
    CostModel balanced = tmpl;
    balanced.p = p_values[i];
    balanced.memory_balanced = true;
    balanced.validate();

    CostModel sized = balanced;
    sized.memory_balanced = false;
    const double mult = rule == NRule::EqualP ? 1.0 : (rule == NRule::TenP ? 10.0 : 100.0);
    sized.n = mult * balanced.p;

    CurveRow row;
    row.p = balanced.p;
    row.eff_recovery = eff_recovery(balanced);
    row.eff_hrbr = eff_hrbr(sized);
    row.s_required = required_speedup(balanced);
    row.prob_fail_window = hrbr_failure_probability(balanced);
    rows.push_back(row);
  }
  return rows;
}

void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "p,eff_recovery,eff_hrbr,s_required,prob_fail_window\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.p, r.eff_recovery,
                  r.eff_hrbr, r.s_required, r.prob_fail_window);
    out << buf;
  }
}

std::vector<CurveRow> read_curves_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "p,eff_recovery,eff_hrbr,s_required,prob_fail_window") {
    throw InvalidArgument("unexpected curve CSV header");
  }
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    double v[5];
    for (double& x : v) {
      if (!std::getline(ss, field, ',')) throw InvalidArgument("short curve CSV row");
      x = std::stod(field);
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  return rows;
}

}  // namespace hrbr
