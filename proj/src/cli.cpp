#include "hrbr/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "hrbr/engine.hpp"
#include "hrbr/error.hpp"
#include "hrbr/model.hpp"

namespace hrbr {

namespace {

// A bad flag value; `key` is the flag to blame in the diagnostic.
struct ConfigError : std::runtime_error {
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key(std::move(key)) {}
  std::string key;
};

struct RunOptions {
  std::size_t n = 256;
  std::string grid = "2x2";
  std::optional<std::size_t> block, mb, nb;
  std::size_t redundancy = 1;
  std::string strategy = "hrbr";
  std::string failures = "none";
  std::uint64_t seed = 1;
  double f = 1e9;
  double c = 2.0;
  double lambda = 0.0;
  double speedup = 3.0;
  std::string log_base = "2";
  std::string recovery_mode = "deterministic";
  std::string matrix;
  std::string output;
  std::string exec = "serial";
};

struct ModelOptions {
  std::string preset;
  std::string p = "1e3:1e6";
  std::optional<double> c, lambda, mttf;
  double f = 1e9;
  std::string n_rule = "n=p";
  std::string log_base = "2";
  double speedup = 3.0;
  std::string output;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LogBase parse_log_base(const std::string& s) {
  if (s == "2") return LogBase::Two;
  if (s == "e") return LogBase::Natural;
  throw ConfigError("--log-base", "expected 2 or e, got '" + s + "'");
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  auto num = [&](std::string_view t) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || v == 0) {
      throw ConfigError("--grid", "expected PxQ with positive P and Q, got '" + s + "'");
    }
    return v;
  };
  if (x == std::string::npos) throw ConfigError("--grid", "expected PxQ, got '" + s + "'");
  const std::string_view sv(s);
  return {num(sv.substr(0, x)), num(sv.substr(x + 1))};
}

DenseMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--matrix", "cannot open '" + path + "'");
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows == 0 || cols == 0) {
    throw ConfigError("--matrix", "missing or bad 'rows cols' header in '" + path + "'");
  }
  std::vector<double> values(rows * cols);
  for (auto& v : values) {
    if (!(in >> v)) throw ConfigError("--matrix", "too few values in '" + path + "'");
  }
  double extra;
  if (in >> extra) throw ConfigError("--matrix", "too many values in '" + path + "'");
  if (rows != cols) throw ConfigError("--matrix", "matrix must be square");
  return DenseMatrix(rows, cols, std::move(values));
}

struct Problem {
  DenseMatrix a;
  DenseMatrix b;
  EngineConfig config;
};

// Everything is checked here, before any work starts.
Problem build_problem(const RunOptions& o, bool n_given) {
  Problem pr;
  if (!o.matrix.empty()) {
    pr.a = read_matrix(o.matrix);
    if (n_given && o.n != pr.a.rows()) {
      throw ConfigError("--n", "does not match the order of --matrix");
    }
  } else {
    if (o.n == 0) throw ConfigError("--n", "must be positive");
    pr.a = DenseMatrix::random(o.n, o.n, o.seed);
  }
  pr.b = DenseMatrix::random(pr.a.rows(), 1, o.seed + 0x9e3779b97f4a7c15ULL);

  auto& cfg = pr.config;
  const auto [P, Q] = parse_grid(o.grid);
  cfg.grid.P = P;
  cfg.grid.Q = Q;
  const std::size_t blk = o.block.value_or(16);
  cfg.grid.mb = o.mb.value_or(blk);
  cfg.grid.nb = o.nb.value_or(blk);
  if (cfg.grid.mb == 0) throw ConfigError(o.mb ? "--mb" : "--block", "must be positive");
  if (cfg.grid.nb == 0) throw ConfigError(o.nb ? "--nb" : "--block", "must be positive");
  cfg.grid.r = o.redundancy;

  try {
    cfg.strategy = parse_strategy(o.strategy);
  } catch (const Error& e) {
    throw ConfigError("--strategy", e.what());
  }
  try {
    cfg.schedule = parse_schedule(o.failures);
  } catch (const Error& e) {
    throw ConfigError("--failures", e.what());
  }
  const std::size_t panels = (pr.a.rows() + cfg.grid.nb - 1) / cfg.grid.nb;
  for (const auto& f : cfg.schedule.scheduled) {
    if (f.step > panels) {
      throw ConfigError("--failures", "step " + std::to_string(f.step) + " exceeds panel count " +
                                          std::to_string(panels));
    }
    if (f.victim.row >= P || f.victim.col >= cfg.grid.total_cols()) {
      throw ConfigError("--failures", "victim outside the " + std::to_string(P) + "x" +
                                          std::to_string(cfg.grid.total_cols()) + " process grid");
    }
  }
  if (cfg.schedule.poisson && !(cfg.schedule.poisson->rate >= 0.0)) {
    throw ConfigError("--failures", "poisson rate must be nonnegative");
  }

  if (!(o.f > 0.0) || !std::isfinite(o.f)) throw ConfigError("--f", "must be positive");
  if (!(o.c >= 0.0) || !std::isfinite(o.c)) throw ConfigError("--c", "must be nonnegative");
  if (!(o.lambda >= 0.0) || !std::isfinite(o.lambda)) throw ConfigError("--lambda", "must be nonnegative");
  if (!(o.speedup > 1.0)) throw ConfigError("--speedup", "must exceed 1");
  cfg.cost.f = o.f;
  cfg.cost.c = o.c;
  cfg.cost.lambda = o.lambda;
  cfg.cost.s = o.speedup;
  cfg.cost.log_base = parse_log_base(o.log_base);

  if (o.recovery_mode == "deterministic") cfg.recovery_charge = RecoveryCharge::Deterministic;
  else if (o.recovery_mode == "expected") cfg.recovery_charge = RecoveryCharge::Expected;
  else throw ConfigError("--recovery-mode", "expected deterministic or expected");

  if (o.exec == "serial") cfg.policy = ExecPolicy::Serial;
  else if (o.exec == "parallel") cfg.policy = ExecPolicy::Parallel;
  else throw ConfigError("--exec", "expected serial or parallel");
  return pr;
}

constexpr const char* kRunHeader =
    "strategy,n,P,Q,failures,outcome,residual,total_vtime,compute,comm,recovery,rebuild,recompute";

std::string report_row(const RunReport& r) {
  std::ostringstream os;
  os << to_string(r.strategy) << ',' << r.n << ',' << r.grid.P << ',' << r.grid.Q << ','
     << r.failures_injected << ',' << to_string(r.outcome) << ',' << fmt(r.scaled_residual) << ','
     << fmt(r.clock.elapsed()) << ',' << fmt(r.clock.compute) << ',' << fmt(r.clock.communicate)
     << ',' << fmt(r.clock.recovery) << ',' << fmt(r.clock.rebuild) << ','
     << fmt(r.clock.recompute_solution);
  return os.str();
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Completed: return 0;
    case Outcome::Unrecoverable: return 2;
    case Outcome::Singular: return 3;
  }
  return 1;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError("--output", "cannot open '" + path + "' for writing");
  file << text;
}

void add_run_flags(CLI::App& cmd, RunOptions& o) {
  cmd.add_option("--n", o.n, "Matrix order");
  cmd.add_option("--grid", o.grid, "Data process grid PxQ");
  cmd.add_option("--block", o.block, "Block size for rows and columns");
  cmd.add_option("--mb", o.mb, "Row block size");
  cmd.add_option("--nb", o.nb, "Column block size");
  cmd.add_option("--redundancy", o.redundancy, "Redundancy process columns");
  cmd.add_option("--strategy", o.strategy, "none | abft-r | hrbr");
  cmd.add_option("--failures", o.failures, "STEP:PROW,PCOL[;...] | poisson:RATE:SEED | none");
  cmd.add_option("--seed", o.seed, "Matrix seed");
  cmd.add_option("--f", o.f, "Flop/s per process");
  cmd.add_option("--c", o.c, "Flop rate over link bandwidth (bytes/s)");
  cmd.add_option("--lambda", o.lambda, "Per-process failure rate (1/s)");
  cmd.add_option("--speedup", o.speedup, "Background rebuild speedup s");
  cmd.add_option("--log-base", o.log_base, "2 | e");
  cmd.add_option("--recovery-mode", o.recovery_mode, "deterministic | expected");
  cmd.add_option("--matrix", o.matrix, "Dense matrix file: 'rows cols' then row-major values");
  cmd.add_option("--output", o.output, "CSV output path (stdout when omitted)");
  cmd.add_option("--exec", o.exec, "serial | parallel");
}

int cmd_run(const RunOptions& o, bool n_given, std::ostream& out) {
  const Problem pr = build_problem(o, n_given);
  const RunReport rep = run(pr.a, pr.b, pr.config);
  emit(std::string(kRunHeader) + "\n" + report_row(rep) + "\n", o.output, out);
  return exit_code(rep.outcome);
}

int cmd_compare(const RunOptions& o, bool n_given, std::ostream& out) {
  Problem pr = build_problem(o, n_given);
  auto launch = [&pr](Strategy s) {
    EngineConfig cfg = pr.config;
    cfg.strategy = s;
    return std::async(std::launch::async, [&pr, cfg] { return run(pr.a, pr.b, cfg); });
  };
  auto abft = launch(Strategy::AbftR);
  auto hrbr = launch(Strategy::Hrbr);
  const RunReport ra = abft.get();
  const RunReport rh = hrbr.get();

  std::string text = std::string(kRunHeader) + "\n" + report_row(ra) + "\n" + report_row(rh) + "\n";
  text += "ratio," + fmt(rh.clock.elapsed() / ra.clock.elapsed()) + "\n";
  emit(text, o.output, out);
  return std::max(exit_code(ra.outcome), exit_code(rh.outcome));
}

std::vector<double> parse_p_range(const std::string& s) {
  auto num = [&](std::string_view t) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !(v >= 1.0) || !std::isfinite(v)) {
      throw ConfigError("--p", "expected LO:HI[:PER_DECADE] with values >= 1, got '" + s + "'");
    }
    return v;
  };
  std::vector<std::string_view> parts;
  std::string_view sv(s);
  for (std::size_t pos = 0;;) {
    const auto colon = sv.find(':', pos);
    parts.push_back(sv.substr(pos, colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) return {num(parts[0])};
  if (parts.size() > 3) throw ConfigError("--p", "too many fields in '" + s + "'");
  const double lo = num(parts[0]);
  const double hi = num(parts[1]);
  const double per = parts.size() == 3 ? num(parts[2]) : 1.0;
  if (hi < lo) throw ConfigError("--p", "upper bound below lower bound");
  if (per != std::floor(per) || per > 100) throw ConfigError("--p", "points per decade must be an integer in 1..100");
  std::vector<double> ps;
  for (int i = 0;; ++i) {
    const double p = lo * std::pow(10.0, i / per);
    if (p > hi * (1.0 + 1e-12)) break;
    ps.push_back(p);
  }
  return ps;
}

int cmd_model(const ModelOptions& o, std::ostream& out) {
  const LogBase base = parse_log_base(o.log_base);
  const auto ps = parse_p_range(o.p);

  CostModel cm;
  if (!o.preset.empty()) {
    if (o.preset != "calibrated") {
      throw ConfigError("--preset", "unknown preset '" + o.preset + "'");
    }
    cm = reference_calibration(o.c.value_or(100.0), 1e6, base);
  } else if (!o.lambda && !o.mttf) {
    throw ConfigError("--lambda", "required (or --mttf, or --preset calibrated)");
  }
  if (o.c) {
    if (!(*o.c >= 0.0)) throw ConfigError("--c", "must be nonnegative");
    cm.c = *o.c;
  }
  if (o.lambda && o.mttf) throw ConfigError("--mttf", "give either --lambda or --mttf");
  if (o.lambda) {
    if (!(*o.lambda >= 0.0) || !std::isfinite(*o.lambda)) throw ConfigError("--lambda", "must be nonnegative");
    cm.lambda = *o.lambda;
  }
  if (o.mttf) {
    if (!(*o.mttf > 0.0)) throw ConfigError("--mttf", "must be positive");
    cm.lambda = 1.0 / *o.mttf;
  }
  if (!(o.f > 0.0)) throw ConfigError("--f", "must be positive");
  if (!(o.speedup > 1.0)) throw ConfigError("--speedup", "must exceed 1");
  cm.f = o.f;
  cm.s = o.speedup;
  cm.log_base = base;

  NRule rule;
  if (o.n_rule == "n=p") rule = NRule::EqualP;
  else if (o.n_rule == "n=10p") rule = NRule::TenP;
  else if (o.n_rule == "n=100p") rule = NRule::HundredP;
  else throw ConfigError("--n-rule", "expected n=p, n=10p or n=100p");

  std::ostringstream os;
  write_curves_csv(os, emit_curves(cm, ps, rule));
  emit(os.str(), o.output, out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fault-tolerant LU laboratory", "hrbr_lab"};
  app.require_subcommand(1);

  RunOptions run_opts, cmp_opts;
  ModelOptions model_opts;
  auto* run_cmd = app.add_subcommand("run", "Solve one system under a failure schedule");
  add_run_flags(*run_cmd, run_opts);
  auto* cmp_cmd = app.add_subcommand("compare", "Run abft-r and hrbr on the same input");
  add_run_flags(*cmp_cmd, cmp_opts);

  auto* model_cmd = app.add_subcommand("model", "Emit analytic efficiency curves");
  model_cmd->add_option("--preset", model_opts.preset, "calibrated");
  model_cmd->add_option("--p", model_opts.p, "LO:HI[:PER_DECADE] or a single p");
  model_cmd->add_option("--c", model_opts.c, "Flop rate over link bandwidth");
  model_cmd->add_option("--f", model_opts.f, "Flop/s per processor");
  model_cmd->add_option("--lambda", model_opts.lambda, "Per-processor failure rate (1/s)");
  model_cmd->add_option("--mttf", model_opts.mttf, "Per-processor MTTF (s)");
  model_cmd->add_option("--n-rule", model_opts.n_rule, "n=p | n=10p | n=100p");
  model_cmd->add_option("--log-base", model_opts.log_base, "2 | e");
  model_cmd->add_option("--speedup", model_opts.speedup, "Background rebuild speedup s");
  model_cmd->add_option("--output", model_opts.output, "CSV output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, run_cmd->count("--n") > 0, out);
    if (cmp_cmd->parsed()) return cmd_compare(cmp_opts, cmp_cmd->count("--n") > 0, out);
    return cmd_model(model_opts, out);
  } catch (const ConfigError& e) {
    err << "hrbr_lab: " << e.key << ": " << e.what() << "\n";
  } catch (const Error& e) {
    err << "hrbr_lab: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace hrbr
