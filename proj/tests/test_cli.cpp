#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hrbr/cli.hpp"
#include "hrbr/model.hpp"

using namespace hrbr;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "hrbr_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("hrbr_cli_test_" + name);
}

}  // namespace

TEST_CASE("run completes with a small residual") {
  const auto r = call({"run", "--n", "256", "--grid", "2x2", "--block", "16", "--strategy", "hrbr",
                       "--failures", "4:0,1", "--seed", "7"});
  CHECK(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].size() == 13);
  CHECK(rows[0][0] == "strategy");
  CHECK(rows[0][12] == "recompute");
  CHECK(rows[1][0] == "hrbr");
  CHECK(rows[1][1] == "256");
  CHECK(rows[1][4] == "1");
  CHECK(rows[1][5] == "completed");
  CHECK(std::stod(rows[1][6]) <= 16.0);
}

TEST_CASE("run without redundancy cannot survive a failure") {
  const auto r = call({"run", "--strategy", "hrbr", "--redundancy", "0", "--failures", "1:0,0"});
  CHECK(r.code == 2);
  CHECK(parse_csv(r.out).at(1).at(5) == "unrecoverable");
}

TEST_CASE("configuration errors exit 1 and name the key") {
  const auto out = temp_path("never.csv");
  std::filesystem::remove(out);
  struct Case {
    std::vector<std::string> args;
    std::string key;
  };
  const std::vector<Case> cases{
      {{"run", "--grid", "0x2"}, "--grid"},
      {{"run", "--grid", "2by2"}, "--grid"},
      {{"run", "--strategy", "magic"}, "--strategy"},
      {{"run", "--failures", "1:0"}, "--failures"},
      {{"run", "--failures", "99:0,0", "--n", "32"}, "--failures"},
      {{"run", "--failures", "1:5,0"}, "--failures"},
      {{"run", "--block", "0"}, "--block"},
      {{"run", "--speedup", "1"}, "--speedup"},
      {{"run", "--log-base", "10"}, "--log-base"},
      {{"run", "--exec", "gpu"}, "--exec"},
      {{"run", "--n", "0"}, "--n"},
      {{"run", "--n", "abc"}, "--n"},
      {{"run", "--matrix", "/nonexistent/file"}, "--matrix"},
      {{"compare", "--grid", "2x0"}, "--grid"},
      {{"model", "--p", "1e3:1e6"}, "--lambda"},
      {{"model", "--lambda", "1e-9", "--n-rule", "n=3p"}, "--n-rule"},
      {{"model", "--lambda", "1e-9", "--p", "1e6:1e3"}, "--p"},
      {{"model", "--preset", "fastest"}, "--preset"},
  };
  for (auto c : cases) {
    c.args.push_back("--output");
    c.args.push_back(out.string());
    const auto r = call(c.args);
    INFO(c.args[1]);
    CHECK(r.code == 1);
    CHECK(r.err.find(c.key) != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(out));
  }
  CHECK(call({"run", "--bogus", "1"}).code == 1);
  CHECK(call({}).code == 1);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("matrix file input") {
  const auto path = temp_path("m.txt");
  {
    std::ofstream f(path);
    f << "3 3\n4 1 0\n1 5 2\n0 2 6\n";
  }
  const auto r = call({"run", "--matrix", path.string(), "--grid", "1x2", "--block", "1"});
  CHECK(r.code == 0);
  {
    std::ofstream f(path);
    f << "3 3\n1 2 3\n2 4 6\n1 1 1\n";
  }
  CHECK(call({"run", "--matrix", path.string(), "--grid", "1x2", "--block", "1"}).code == 3);
  {
    std::ofstream f(path);
    f << "2 2\n1 2 3\n";
  }
  CHECK(call({"run", "--matrix", path.string()}).code == 1);
  CHECK(call({"run", "--matrix", path.string(), "--n", "5"}).code == 1);
  std::filesystem::remove(path);
}

TEST_CASE("output file") {
  const auto path = temp_path("run.csv");
  const auto r = call({"run", "--n", "32", "--block", "4", "--output", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(parse_csv(ss.str()).size() == 2);
  std::filesystem::remove(path);
}

TEST_CASE("compare with three failures favours hrbr") {
  const auto r = call({"compare", "--n", "128", "--grid", "4x4", "--block", "8", "--redundancy", "3",
                       "--failures", "2:0,1;6:1,2;10:2,3", "--seed", "3"});
  CHECK(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][0] == "abft-r");
  CHECK(rows[2][0] == "hrbr");
  CHECK(std::stod(rows[2][7]) < std::stod(rows[1][7]));
  CHECK(rows[3][0] == "ratio");
  CHECK(std::stod(rows[3][1]) < 1.0);
}

TEST_CASE("compare without failures charges identical work") {
  const auto r = call({"compare", "--n", "64", "--grid", "2x2", "--block", "8"});
  CHECK(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][8] == rows[2][8]);
  CHECK(rows[1][9] == rows[2][9]);
  CHECK(rows[1][7] == rows[2][7]);
  CHECK(rows[3][1] == "1");
}

TEST_CASE("identical flags give identical bytes") {
  const std::vector<std::string> args{"compare", "--n", "96", "--grid", "2x2", "--block", "8",
                                      "--redundancy", "2", "--failures", "poisson:30000:5"};
  CHECK(call(args).out == call(args).out);
  const std::vector<std::string> model{"model", "--preset", "calibrated", "--p", "1e3:1e6:3"};
  CHECK(call(model).out == call(model).out);
}

TEST_CASE("model sweep") {
  const auto r = call({"model", "--preset", "calibrated", "--p", "1e3:1e6"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  const auto rows = read_curves_csv(in);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].p == 1e3);
  CHECK(rows[3].p == 1e6);
  CHECK(rows[2].eff_recovery < rows[1].eff_recovery);
  CHECK(rows[3].eff_recovery < rows[2].eff_recovery);
  CHECK(rows[3].s_required == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

  const auto dense = call({"model", "--preset", "calibrated", "--p", "1e4:1e6:4"});
  std::istringstream din(dense.out);
  const auto fine = read_curves_csv(din);
  CHECK(fine.size() == 9);
  for (std::size_t i = 1; i < fine.size(); ++i) CHECK(fine[i].eff_recovery < fine[i - 1].eff_recovery);
}

TEST_CASE("model without failures gives the hardware terms") {
  const auto r = call({"model", "--lambda", "0", "--p", "1e2:1e4"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  for (const auto& row : read_curves_csv(in)) {
    CHECK(row.eff_recovery == hardware_efficiency_recovery(row.p));
    CHECK(row.eff_hrbr == 0.98 * hardware_efficiency_hrbr(row.p));
  }
}

TEST_CASE("model at exascale clears 0.88 under the calibrated MTTF") {
  const auto r = call({"model", "--preset", "calibrated", "--c", "100", "--n-rule", "n=p",
                       "--p", "1e6"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  const auto rows = read_curves_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].eff_hrbr >= 0.88);

  const auto m = call({"model", "--mttf", "2.996e8", "--c", "100", "--n-rule", "n=p", "--p", "1e6"});
  std::istringstream min(m.out);
  CHECK(read_curves_csv(min).at(0).eff_hrbr >= 0.88);
}

TEST_CASE("model CSV round-trips through text") {
  const auto r = call({"model", "--lambda", "1e-8", "--c", "10", "--p", "1e2:1e5:2", "--n-rule", "n=10p"});
  std::istringstream in(r.out);
  const auto rows = read_curves_csv(in);
  std::ostringstream again;
  write_curves_csv(again, rows);
  CHECK(again.str() == r.out);
}
