#include "hrbr/schedule.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "hrbr/error.hpp"

namespace hrbr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view tok, std::string_view what) {
  tok = trim(tok);
  T value{};
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end || tok.empty()) {
    throw InvalidArgument("bad " + std::string(what) + " '" + std::string(tok) + "' in schedule");
  }
  return value;
}

}  // namespace

FailureSchedule parse_schedule(std::string_view text) {
  FailureSchedule out;
  text = trim(text);
  if (text.empty() || text == "none") return out;

  if (text.starts_with("poisson:")) {
    const auto rest = text.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw InvalidArgument("poisson schedule needs poisson:RATE:SEED, got '" + std::string(text) + "'");
    }
    PoissonFailures pf;
    pf.rate = parse_number<double>(rest.substr(0, colon), "rate");
    pf.seed = parse_number<std::uint64_t>(rest.substr(colon + 1), "seed");
    if (!(pf.rate >= 0.0) || !std::isfinite(pf.rate)) {
      throw InvalidArgument("poisson rate must be finite and non-negative");
    }
    out.poisson = pf;
    return out;
  }

  while (!text.empty()) {
    const auto semi = text.find(';');
    const auto entry = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (entry.empty()) continue;

    const auto colon = entry.find(':');
    const auto comma = entry.find(',');
    if (colon == std::string_view::npos || comma == std::string_view::npos || comma < colon) {
      throw InvalidArgument("schedule entry '" + std::string(entry) + "' is not STEP:PROW,PCOL");
    }
    ScheduledFailure f;
    f.step = parse_number<std::size_t>(entry.substr(0, colon), "step");
    f.victim.row = parse_number<std::size_t>(entry.substr(colon + 1, comma - colon - 1), "process row");
    f.victim.col = parse_number<std::size_t>(entry.substr(comma + 1), "process column");
    out.scheduled.push_back(f);
  }
  return out;
}

std::string to_string(const FailureSchedule& schedule) {
  if (schedule.poisson) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "poisson:%.17g:", schedule.poisson->rate);
    return buf + std::to_string(schedule.poisson->seed);
  }
  if (schedule.scheduled.empty()) return "none";
  std::string s;
  for (const auto& f : schedule.scheduled) {
    if (!s.empty()) s += ';';
    s += std::to_string(f.step) + ":" + std::to_string(f.victim.row) + "," +
         std::to_string(f.victim.col);
  }
  return s;
}

}  // namespace hrbr
