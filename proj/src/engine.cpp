#include "hrbr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "hrbr/error.hpp"

namespace hrbr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t proc_index(const DistMatrix& d, const ProcCoord& c) {
  return c.row * d.grid().total_cols() + c.col;
}

double tree_depth(double procs, LogBase base) { return procs > 1.0 ? log_of(procs, base) : 0.0; }

bool column_live(const DistMatrix& d, std::size_t pcol) {
  for (std::size_t p = 0; p < d.grid().P; ++p) {
    if (d.status(p, pcol) == ProcStatus::Failed) return false;
  }
  return true;
}

void flush(LocalBlock& blk) {
  std::fill(blk.data.begin(), blk.data.end(), kNaN);
  std::fill(blk.rhs.begin(), blk.rhs.end(), kNaN);
}

// Largest count over processes of indices >= from along one grid axis.
std::size_t max_remaining(std::size_t n, std::size_t from, std::size_t b, std::size_t procs) {
  std::size_t best = 0;
  for (std::size_t p = 0; p < procs; ++p) {
    best = std::max(best, cyclic_count(n, p, b, procs) - cyclic_count(std::min(from, n), p, b, procs));
  }
  return best;
}

// Virtual cost of one panel. Depends only on the shape of the problem, so
// strategies that see the same failures pay the same foreground factorization
// cost.
std::pair<double, double> panel_cost(const GridSpec& g, std::size_t n, std::size_t step,
                                     const CostModel& cm) {
  const std::size_t j0 = step * g.nb;
  const std::size_t j1 = std::min(n, j0 + g.nb);
  const std::size_t spare_width = g.r > 0 ? spare_cols(g, n) : 0;
  double flops = 0.0;
  double bytes = 0.0;
  for (std::size_t j = j0; j < j1; ++j) {
    const double rows_below = static_cast<double>(max_remaining(n, j + 1, g.mb, g.P));
    const double cols_after =
        static_cast<double>(std::max(max_remaining(n, j + 1, g.nb, g.Q), spare_width));
    flops += rows_below * (2.0 * cols_after + 3.0) + static_cast<double>(n - j) / g.P;
    bytes += 16.0 * tree_depth(static_cast<double>(g.P), cm.log_base);
    bytes += 16.0 * (cols_after + 1.0);
  }
  const double panel_rows = static_cast<double>(max_remaining(n, j0, g.mb, g.P));
  const double trailing_cols =
      static_cast<double>(std::max(max_remaining(n, j1, g.nb, g.Q), spare_width));
  const double width = static_cast<double>(j1 - j0);
  bytes += 8.0 * panel_rows * width * tree_depth(static_cast<double>(g.total_cols()), cm.log_base);
  bytes += 8.0 * width * trailing_cols * tree_depth(static_cast<double>(g.P), cm.log_base);
  return {flops / cm.f, bytes * cm.c / cm.f};
}

void require_data_alive(const DistMatrix& d) {
  for (std::size_t q = 0; q < d.grid().Q; ++q) {
    if (!column_live(d, d.data_col(q))) {
      throw FailedProcessPresent("data column " + std::to_string(q) + " has a failed process");
    }
  }
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::None: return "none";
    case Strategy::AbftR: return "abft-r";
    case Strategy::Hrbr: return "hrbr";
  }
  return "?";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::Unrecoverable: return "unrecoverable";
    case Outcome::Singular: return "singular";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "none") return Strategy::None;
  if (text == "abft-r" || text == "abft_r" || text == "abftr") return Strategy::AbftR;
  if (text == "hrbr") return Strategy::Hrbr;
  throw InvalidArgument("unknown strategy '" + std::string(text) + "'");
}

std::optional<double> EngineState::rebuild_deadline() const {
  if (rebuilds.empty()) return std::nullopt;
  double t = rebuilds.front().ready_at;
  for (const auto& r : rebuilds) t = std::min(t, r.ready_at);
  return t;
}

double EngineState::growth_factor() const {
  double m = 0.0;
  for (std::size_t q = 0; q < dist.grid().Q; ++q) {
    for (std::size_t p = 0; p < dist.grid().P; ++p) {
      for (double v : dist.local(p, dist.data_col(q)).data) m = std::max(m, std::abs(v));
    }
  }
  return initial_max_abs > 0.0 ? std::max(1.0, m / initial_max_abs) : 1.0;
}

EngineState make_state(const DenseMatrix& a, const DenseMatrix& b, const EngineConfig& config) {
  config.grid.validate();
  if (!a.square() || a.rows() == 0) throw DimensionMismatch("A must be square and non-empty");
  const std::size_t n = a.rows();

  EngineState st;
  st.strategy = config.strategy;
  st.recovery_charge = config.recovery_charge;
  st.policy = config.policy;
  st.dist = distribute(a, b, config.grid);
  if (config.grid.r > 0) {
    st.coding = coding_matrix(n, config.grid.r);
    st.dist = encode(std::move(st.dist), st.coding, config.policy);
  } else {
    st.coding = CodingMatrix{n, 0, {}};
  }
  st.panels = (n + config.grid.nb - 1) / config.grid.nb;
  st.transform = TransformationMatrix(n);
  st.pivot_tol = static_cast<double>(n) * kUnitRoundoff * a.norm_inf();
  st.initial_max_abs = a.max_abs();
  st.cost = config.cost;
  st.cost.p = static_cast<double>(config.grid.data_procs());
  st.cost.n = static_cast<double>(n);
  st.cost.memory_balanced = false;
  return st;
}

void step_factor_update(EngineState& state) {
  auto& d = state.dist;
  const auto& g = d.grid();
  const std::size_t n = d.n();
  if (state.step >= state.panels) throw InvalidArgument("factorization already finished");
  require_data_alive(d);

  // Live physical columns and the first local column each one updates.
  struct Target {
    std::size_t pcol;
    std::optional<std::size_t> logical;
  };
  std::vector<Target> targets;
  for (std::size_t c = 0; c < g.total_cols(); ++c) {
    if (!column_live(d, c)) continue;
    targets.push_back({c, d.logical_col(c)});
  }

  const std::size_t j0 = state.step * g.nb;
  const std::size_t j1 = std::min(n, j0 + g.nb);
  std::vector<double> column;
  std::vector<kernels::RowUpdate> updates;

  for (std::size_t j = j0; j < j1; ++j) {
    const std::size_t pc = d.data_col(cyclic_owner(j, g.nb, g.Q));
    const std::size_t jl = cyclic_local(j, g.nb, g.Q);
    auto row_of = [&](std::size_t i) {
      return std::pair{cyclic_owner(i, g.mb, g.P), cyclic_local(i, g.mb, g.P)};
    };

    column.resize(n - j);
    for (std::size_t i = j; i < n; ++i) {
      const auto [p, il] = row_of(i);
      column[i - j] = d.local(p, pc).at(il, jl);
    }
    const std::size_t piv = j + kernels::argmax_abs(column, state.policy);
    const double pivot = column[piv - j];
    if (!(std::abs(pivot) >= state.pivot_tol) || pivot == 0.0) {
      throw SingularMatrix("singular panel: pivot " + std::to_string(pivot) + " at column " +
                           std::to_string(j));
    }

    const auto [pj, lj] = row_of(j);
    if (piv != j) {
      const auto [pp, lp] = row_of(piv);
      for (const auto& t : targets) {
        auto& a = d.local(pj, t.pcol);
        auto& b = d.local(pp, t.pcol);
        std::swap_ranges(a.row(lj).begin(), a.row(lj).end(), b.row(lp).begin());
        std::swap(a.rhs[lj], b.rhs[lp]);
      }
    }

    updates.clear();
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto [p, il] = row_of(i);
      double& lead = d.local(p, pc).at(il, jl);
      const double l = lead / pivot;
      if (l == 0.0) continue;
      lead = 0.0;
      for (const auto& t : targets) {
        auto& dst = d.local(p, t.pcol);
        const auto& src = d.local(pj, t.pcol);
        const std::size_t start =
            t.logical ? cyclic_count(j + 1, *t.logical, g.nb, g.Q) : std::size_t{0};
        if (start < dst.cols) {
          updates.push_back({dst.row(il).data() + start, src.row(lj).data() + start,
                             dst.cols - start, l});
        }
        dst.rhs[il] -= l * src.rhs[lj];
      }
    }
    kernels::apply_row_updates(updates, state.policy);
  }

  const auto [compute, comm] = panel_cost(g, n, state.step, state.cost);
  state.clock.compute += compute;
  state.clock.communicate += comm;
  ++state.step;
}

void inject_failure(EngineState& state, const ProcCoord& victim) {
  auto& d = state.dist;
  const auto& g = d.grid();
  if (victim.row >= g.P || victim.col >= g.total_cols()) {
    throw OutOfRange("victim (" + std::to_string(victim.row) + "," + std::to_string(victim.col) +
                     ") outside the process grid");
  }
  const ProcStatus before = d.status(victim);
  if (before == ProcStatus::Failed) {
    throw VictimNotAlive("process (" + std::to_string(victim.row) + "," +
                         std::to_string(victim.col) + ") is not alive");
  }
  state.failed_from[proc_index(d, victim)] = before;
  flush(d.local(victim));
  d.set_status(victim, ProcStatus::Failed);
  ++state.failures_injected;
}

void stopwait_recover(EngineState& state, const ProcCoord& failed) {
  auto& d = state.dist;
  const auto& g = d.grid();
  const auto it = state.failed_from.find(proc_index(d, failed));
  if (d.status(failed) != ProcStatus::Failed || it == state.failed_from.end()) {
    throw InvalidArgument("process is not failed");
  }
  if (!d.logical_col(failed.col)) throw InvalidArgument("failed process does not serve data");

  const auto spares = d.spare_columns();
  if (spares.empty()) throw NoSpareAvailable("no checksum column available for recovery");
  const std::size_t spare = spares.front();

  auto finite_block = [](const LocalBlock& b) {
    return std::all_of(b.data.begin(), b.data.end(), [](double v) { return std::isfinite(v); });
  };
  if (!finite_block(d.local(failed.row, spare))) throw ChecksumBroken("checksum block is not finite");
  for (std::size_t q = 0; q < g.Q; ++q) {
    const std::size_t c = d.data_col(q);
    if (c == failed.col) continue;
    if (d.status(failed.row, c) == ProcStatus::Failed || !finite_block(d.local(failed.row, c))) {
      throw ChecksumBroken("a second process in row " + std::to_string(failed.row) + " is lost");
    }
  }

  const auto& blk = d.local(failed);
  const double elements = static_cast<double>(blk.rows * blk.cols);
  reconstruct_block(d, failed, spare, state.coding, it->second, state.policy);
  state.failed_from.erase(it);

  // Below-diagonal entries of eliminated columns are known zeros; the checksum
  // only gives them back up to rounding.
  const std::size_t q = *d.logical_col(failed.col);
  const std::size_t eliminated = std::min(d.n(), state.step * g.nb);
  auto& restored = d.local(failed);
  for (std::size_t jl = 0; jl < restored.cols; ++jl) {
    const std::size_t col = cyclic_global(q, jl, g.nb, g.Q);
    if (col >= eliminated) continue;
    for (std::size_t il = 0; il < restored.rows; ++il) {
      if (cyclic_global(failed.row, il, g.mb, g.P) > col) restored.at(il, jl) = 0.0;
    }
  }

  double t = recovery_time_for_elements(elements, state.cost);
  if (state.recovery_charge == RecoveryCharge::Expected) t = expected_time_for(t, state.cost);
  state.clock.recovery += t;
}

void background_rebuild(EngineState& state, std::size_t pcol) {
  auto& d = state.dist;
  const auto& g = d.grid();
  std::size_t rows = 0;
  for (std::size_t p = 0; p < g.P; ++p) rows = std::max(rows, d.local(p, pcol).rows);
  const double elements = static_cast<double>(rows * spare_cols(g, d.n()));
  const double t = expected_time_for(recovery_time_for_elements(elements, state.cost), state.cost);
  const double s = state.cost.s;
  if (!(s > 1.0)) throw SpeedupTooSmall("background speedup must exceed 1");
  const double duration = std::isinf(s) ? 0.0 : t / (s - 1.0);
  state.clock.overlapped += duration;
  state.rebuilds.push_back({pcol, state.clock.elapsed() + duration});
}

void complete_rebuilds(EngineState& state) {
  auto& d = state.dist;
  const auto& g = d.grid();
  const double now = state.clock.elapsed();
  std::vector<PendingRebuild> still;
  for (const auto& r : state.rebuilds) {
    if (r.ready_at > now) {
      still.push_back(r);
      continue;
    }
    encode_column(d, r.pcol, state.coding, state.policy);
    for (std::size_t p = 0; p < g.P; ++p) {
      d.local(p, r.pcol).rhs = d.local(p, d.data_col(0)).rhs;
      d.set_status({p, r.pcol}, ProcStatus::Redundant);
      state.failed_from.erase(proc_index(d, {p, r.pcol}));
    }
  }
  state.rebuilds = std::move(still);
}

void hot_replace(EngineState& state, std::size_t failed_pcol) {
  auto& d = state.dist;
  const auto& g = d.grid();
  const std::size_t n = d.n();
  const auto logical = d.logical_col(failed_pcol);
  if (!logical) throw InvalidArgument("column does not serve data");
  const std::size_t q = *logical;
  const auto spares = d.spare_columns();
  if (spares.empty()) throw NoSpareAvailable("no usable redundancy column");
  const std::size_t spare = spares.front();
  const std::size_t k = d.coding_index(spare) % state.coding.m;
  const std::size_t eliminated = std::min(n, state.step * g.nb);
  const std::size_t width = local_cols(q, g, n);

  std::vector<std::vector<double>> weights(g.Q);
  for (std::size_t qq = 0; qq < g.Q; ++qq) weights[qq] = column_weights(state.coding, k, qq, g, n);

  // Finished columns: their rows are final and only read by the closing back
  // substitution, so they are restored from the checksum off the critical path.
  double restored = 0.0;
  for (std::size_t p = 0; p < g.P; ++p) {
    auto& blk = d.local(p, spare);
    for (std::size_t jl = 0; jl < width; ++jl) {
      const std::size_t col = cyclic_global(q, jl, g.nb, g.Q);
      if (col >= eliminated) continue;
      for (std::size_t il = 0; il < blk.rows; ++il) {
        if (cyclic_global(p, il, g.mb, g.P) > col) {
          blk.at(il, jl) = 0.0;
          continue;
        }
        double v = blk.at(il, jl);
        for (std::size_t qq = 0; qq < g.Q; ++qq) {
          if (qq == q) continue;
          const auto& other = d.local(p, d.data_col(qq));
          if (jl < other.cols) v -= weights[qq][jl] * other.at(il, jl);
        }
        blk.at(il, jl) = v / weights[q][jl];
        restored += 1.0;
      }
    }
  }

  Replacement rep;
  rep.replaced_proc_col = q;
  rep.failed_pcol = failed_pcol;
  rep.coding_col = spare;
  rep.at_step = state.step;
  rep.at_time = state.clock.elapsed();
  for (std::size_t jl = 0; jl < width; ++jl) {
    const std::size_t col = cyclic_global(q, jl, g.nb, g.Q);
    rep.global_col_blocks.push_back(col);
    if (col < eliminated) continue;
    CodingVector cv{col, {}};
    for (std::size_t qq = 0; qq < g.Q; ++qq) {
      const std::size_t member = cyclic_global(qq, jl, g.nb, g.Q);
      if (member < n) cv.entries.emplace_back(member, state.coding.weight(member, k));
    }
    rep.coding_vectors.push_back(std::move(cv));
  }
  if (!rep.coding_vectors.empty()) state.transform.append_factor(rep.coding_vectors);

  for (std::size_t p = 0; p < g.P; ++p) {
    d.local(p, spare).resize_cols(width);
    d.set_status({p, spare}, ProcStatus::ConsumedRedundant);
    auto& dead = d.local(p, failed_pcol);
    dead.resize_cols(spare_cols(g, n));
    flush(dead);
    d.set_status({p, failed_pcol}, ProcStatus::Failed);
    state.failed_from.erase(proc_index(d, {p, failed_pcol}));
  }
  d.set_data_col(q, spare);
  d.set_coding_index(failed_pcol, k);

  state.clock.overlapped += recovery_time_for_elements(restored, state.cost);
  state.replacements.push_back(std::move(rep));

  // The retired column comes back as a spare; the remaining spares encode the
  // pre-replacement matrix and are unusable until refreshed.
  background_rebuild(state, failed_pcol);
  for (std::size_t i = 1; i < spares.size(); ++i) {
    for (std::size_t p = 0; p < g.P; ++p) {
      flush(d.local(p, spares[i]));
      d.set_status({p, spares[i]}, ProcStatus::Failed);
    }
    background_rebuild(state, spares[i]);
  }
}

std::vector<double> back_substitute_state(EngineState& state) {
  const auto& g = state.dist.grid();
  const DenseMatrix u = gather(state.dist);
  const auto c = gather_rhs(state.dist);
  for (std::size_t i = 0; i < u.rows(); ++i) {
    if (u(i, i) == 0.0 || !std::isfinite(u(i, i))) throw SingularMatrix("zero on the diagonal of U");
  }
  const double n = static_cast<double>(u.rows());
  state.clock.compute += n * n / static_cast<double>(g.P) / state.cost.f;
  state.clock.communicate +=
      8.0 * n * tree_depth(static_cast<double>(g.Q), state.cost.log_base) * state.cost.c / state.cost.f;
  return back_substitute(u, c);
}

std::vector<double> recover_solution(EngineState& state, std::span<const double> y) {
  const double per_factor = (8.0 * state.cost.c + 1.0) * static_cast<double>(y.size()) / state.cost.f;
  state.clock.recompute_solution +=
      per_factor * static_cast<double>(state.transform.factors().size());
  return recover_solution(state.transform, y);
}

namespace {

// Handles every failure at one boundary. Returns false when the run cannot continue.
bool handle_failures(EngineState& state, std::vector<ProcCoord> victims) {
  auto& d = state.dist;
  std::sort(victims.begin(), victims.end(), [](const ProcCoord& a, const ProcCoord& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  victims.erase(std::unique(victims.begin(), victims.end()), victims.end());

  std::set<std::size_t> cols;
  for (const auto& v : victims) {
    inject_failure(state, v);
    cols.insert(v.col);
  }
  if (cols.size() > 1) return false;

  const std::size_t pcol = *cols.begin();
  if (!d.logical_col(pcol)) {
    // A redundancy process: one spare fewer, data untouched.
    for (std::size_t p = 0; p < d.grid().P; ++p) {
      flush(d.local(p, pcol));
      d.set_status({p, pcol}, ProcStatus::Failed);
    }
    return true;
  }

  try {
    switch (state.strategy) {
      case Strategy::None:
        return false;
      case Strategy::AbftR:
        for (const auto& v : victims) stopwait_recover(state, v);
        return true;
      case Strategy::Hrbr:
        hot_replace(state, pcol);
        return true;
    }
  } catch (const NoSpareAvailable&) {
    return false;
  } catch (const ChecksumBroken&) {
    return false;
  }
  return false;
}

std::optional<ProcCoord> draw_victim(const EngineState& state, std::mt19937_64& rng,
                                     const PoissonFailures& pf, double dt) {
  const double prob = -std::expm1(-pf.rate * dt);
  const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
  if (!(u < prob)) return std::nullopt;
  const auto& g = state.dist.grid();
  std::vector<ProcCoord> alive;
  for (std::size_t p = 0; p < g.P; ++p) {
    for (std::size_t c = 0; c < g.total_cols(); ++c) {
      if (state.dist.status(p, c) != ProcStatus::Failed) alive.push_back({p, c});
    }
  }
  if (alive.empty()) return std::nullopt;
  return alive[rng() % alive.size()];
}

}  // namespace

RunReport run(const DenseMatrix& a, const DenseMatrix& b, const EngineConfig& config,
              const RunHooks& hooks) {
  EngineState state = make_state(a, b, config);
  const auto& g = state.dist.grid();

  RunReport report;
  report.strategy = config.strategy;
  report.n = a.rows();
  report.grid = g;

  for (const auto& f : config.schedule.scheduled) {
    if (f.step > state.panels) {
      throw InvalidArgument("failure step " + std::to_string(f.step) + " beyond panel count " +
                            std::to_string(state.panels));
    }
    if (f.victim.row >= g.P || f.victim.col >= g.total_cols()) {
      throw InvalidArgument("failure victim outside the process grid");
    }
  }

  auto finish = [&](Outcome outcome) {
    report.outcome = outcome;
    report.clock = state.clock;
    report.failures_injected = state.failures_injected;
    report.replacements = state.replacements.size();
    const double elapsed = state.clock.elapsed();
    report.measured_time_efficiency =
        elapsed > 0.0 ? (state.clock.compute + state.clock.communicate) / elapsed : 1.0;
    if (outcome != Outcome::Completed) report.scaled_residual = kNaN;
    return report;
  };

  std::mt19937_64 rng(config.schedule.poisson ? config.schedule.poisson->seed : 0);
  double last_boundary = 0.0;

  for (std::size_t s = 0; s <= state.panels; ++s) {
    complete_rebuilds(state);

    std::vector<ProcCoord> victims;
    for (const auto& f : config.schedule.scheduled) {
      if (f.step == s) victims.push_back(f.victim);
    }
    if (config.schedule.poisson) {
      const double now = state.clock.elapsed();
      if (auto v = draw_victim(state, rng, *config.schedule.poisson, now - last_boundary)) {
        victims.push_back(*v);
      }
      last_boundary = now;
    }
    if (!victims.empty()) {
      if (!handle_failures(state, std::move(victims))) return finish(Outcome::Unrecoverable);
      if (hooks.after_failure) hooks.after_failure(state);
    }

    if (s == state.panels) break;
    try {
      step_factor_update(state);
    } catch (const SingularMatrix&) {
      return finish(Outcome::Singular);
    }
    if (hooks.after_step) hooks.after_step(state);
  }

  std::vector<double> y;
  try {
    y = back_substitute_state(state);
  } catch (const SingularMatrix&) {
    return finish(Outcome::Singular);
  }
  report.solution = state.transform.is_identity() ? y : recover_solution(state, y);
  report.scaled_residual = residual_check(a, DenseMatrix::column(report.solution), b);
  return finish(Outcome::Completed);
}

}  // namespace hrbr
