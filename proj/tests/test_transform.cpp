#include <doctest.h>

#include <cmath>

#include "hrbr/engine.hpp"
#include "hrbr/error.hpp"
#include "hrbr/transform.hpp"

using namespace hrbr;

namespace {

std::vector<double> dense_apply(const DenseMatrix& t, const std::vector<double>& y) {
  const auto x = matmul(t, DenseMatrix::column(y));
  return std::vector<double>(x.data().begin(), x.data().end());
}

}  // namespace

TEST_CASE("no replacements is the identity") {
  const auto t = build_transformation({}, 5);
  CHECK(t.is_identity());
  CHECK(t.dense() == DenseMatrix::identity(5));
  const std::vector<double> y{1, 2, 3, 4, 5};
  CHECK(recover_solution(t, y) == y);
}

TEST_CASE("one replaced column carries the sum vector") {
  // P = 1, Q = n: process column i owns global column i only
  const std::size_t n = 5, i = 2;
  TransformationMatrix t(n);
  CodingVector cv{i, {}};
  for (std::size_t r = 0; r < n; ++r) cv.entries.emplace_back(r, 1.0);
  t.append_factor({cv});
  const auto dense = t.dense();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) CHECK(dense(r, c) == (c == i ? 1.0 : (r == c ? 1.0 : 0.0)));
  }
  const std::vector<double> y{10, 20, 30, 40, 50};
  const auto x = recover_solution(t, y);
  for (std::size_t j = 0; j < n; ++j) CHECK(x[j] == (j == i ? y[i] : y[i] + y[j]));
}

TEST_CASE("four by four example with process column 1 replaced") {
  const std::size_t n = 4;
  const auto a = DenseMatrix::random(n, n, 21);
  const auto b = DenseMatrix::random(n, 1, 22);
  EngineConfig cfg;
  cfg.grid = {2, 2, 1, 1, 1};
  auto st = make_state(a, b, cfg);
  hot_replace(st, 1);

  const auto& rep = st.replacements.at(0);
  CHECK(rep.replaced_proc_col == 1);
  CHECK(rep.global_col_blocks == std::vector<std::size_t>{1, 3});
  CHECK(build_transformation(st.replacements, n).dense() == st.transform.dense());

  DenseMatrix t_expected{{1, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 0, 1}};
  CHECK(st.transform.dense() == t_expected);
  CHECK(gather(st.dist) == matmul(a, t_expected));

  const std::vector<double> y{3, 5, 7, 11};
  CHECK(recover_solution(st.transform, y) == std::vector<double>{8, 5, 18, 11});
}

TEST_CASE("sparse apply equals dense multiplication") {
  const std::size_t n = 9;
  TransformationMatrix t(n);
  t.append_factor({CodingVector{1, {{0, 1.0}, {1, 1.0}, {4, 1.0}}}, CodingVector{6, {{6, 2.0}, {8, -1.0}}}});
  t.append_factor({CodingVector{3, {{1, 1.0}, {3, 1.0}, {7, 0.5}}}});
  t.append_factor({CodingVector{8, {{8, 1.0}, {0, 3.0}, {2, 1.0}}}});
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.25 * static_cast<double>(i * i) - 1.0;
  const auto x = recover_solution(t, y);
  const auto xd = dense_apply(t.dense(), y);
  for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-14));

  // dense() is the ordered product of the factors
  DenseMatrix prod = DenseMatrix::identity(n);
  for (const auto& f : t.factors()) {
    TransformationMatrix single(n);
    single.append_factor(f);
    prod = matmul(prod, single.dense());
  }
  CHECK(prod == t.dense());
}

TEST_CASE("two replacements with a refreshed spare") {
  const std::size_t n = 8;
  const auto a = DenseMatrix::random(n, n, 30);
  const auto b = DenseMatrix::random(n, 1, 31);
  EngineConfig cfg;
  cfg.grid = {2, 2, 1, 1, 1};
  cfg.cost.s = INFINITY;
  auto st = make_state(a, b, cfg);
  hot_replace(st, 0);
  CHECK(st.spares_available() == 0);
  complete_rebuilds(st);
  CHECK(st.spares_available() == 1);
  hot_replace(st, st.dist.data_col(1));
  CHECK(st.transform.factors().size() == 2);

  const auto expect = matmul(a, st.transform.dense());
  const auto got = gather(st.dist);
  double worst = 0.0;
  for (std::size_t i = 0; i < got.data().size(); ++i) {
    worst = std::max(worst, std::abs(got.data()[i] - expect.data()[i]));
  }
  CHECK(worst <= 50.0 * n * kUnitRoundoff * a.norm_inf());
  CHECK(build_transformation(st.replacements, n).dense() == st.transform.dense());
}

TEST_CASE("invalid factors") {
  TransformationMatrix t(4);
  CHECK_THROWS_AS(t.append_factor({CodingVector{1, {{1, 1.0}}}, CodingVector{1, {{1, 1.0}}}}), InvalidArgument);
  CHECK_THROWS_AS(t.append_factor({CodingVector{5, {{1, 1.0}}}}), OutOfRange);
  CHECK_THROWS_AS(t.append_factor({CodingVector{1, {{7, 1.0}}}}), OutOfRange);
  // zero on the diagonal of a replaced column
  CHECK_THROWS_AS(t.append_factor({CodingVector{2, {{0, 1.0}}}}), SingularTransformation);
  // two replaced columns with the same coding vector
  CHECK_THROWS_AS(t.append_factor({CodingVector{0, {{0, 1.0}, {1, 1.0}}}, CodingVector{1, {{0, 1.0}, {1, 1.0}}}}),
                  SingularTransformation);
  CHECK(t.is_identity());
}
