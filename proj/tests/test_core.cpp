#include <doctest.h>

#include <random>

#include "vanar/core.hpp"

using namespace vanar;

namespace {

Dataset two_var(int t_len) {
  Matrix m(t_len, 2);
  for (int t = 0; t < t_len; ++t) {
    m(t, 0) = t + 1;
    m(t, 1) = 10.0 * (t + 1);
  }
  return Dataset({"x", "y"}, m);
}

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 5.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng) + 3.0 * j;
  return m;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("dataset validates construction") {
  CHECK_THROWS_WITH(Dataset({"x"}, Matrix(0, 1)), "empty dataset");
  CHECK_THROWS(Dataset({"x", "x"}, Matrix::Zero(2, 2)));
  CHECK_THROWS(Dataset({"x"}, Matrix::Zero(2, 2)));
  Matrix bad = Matrix::Zero(2, 1);
  bad(1, 0) = std::nan("");
  CHECK_THROWS(Dataset({"x"}, bad));

  const Dataset d = two_var(4);
  CHECK(d.index_of("y") == 1);
  CHECK_FALSE(d.has("z"));
  CHECK_THROWS(d.column("z"));
  CHECK(d.select({"y"}).values() == d.values().col(1));
}

TEST_CASE("lag design on a single variable") {
  Matrix x(4, 1);
  x << 1, 2, 3, 4;
  const LagDesign d = build_lag_design(x, 2);
  Matrix in(2, 2), tg(2, 1);
  in << 2, 1, 3, 2;
  tg << 3, 4;
  CHECK(d.inputs == in);
  CHECK(d.targets == tg);
}

TEST_CASE("lag design on a constant series") {
  const LagDesign d = build_lag_design(Matrix::Constant(3, 1, 5.0), 1);
  CHECK(d.inputs == Matrix::Constant(2, 1, 5.0));
  CHECK(d.targets == Matrix::Constant(2, 1, 5.0));
}

TEST_CASE("lag design two variables T=6 p=3 matches hand table") {
  const LagDesign d = build_lag_design(two_var(6), 3);
  Matrix in(3, 6), tg(3, 2);
  in << 3, 2, 1, 30, 20, 10,
        4, 3, 2, 40, 30, 20,
        5, 4, 3, 50, 40, 30;
  tg << 4, 40, 5, 50, 6, 60;
  CHECK(d.inputs == in);
  CHECK(d.targets == tg);

  Vector last(6);
  last << 6, 5, 4, 60, 50, 40;
  CHECK(lag_vector(two_var(6).values(), 3) == last);
}

TEST_CASE("lag design errors") {
  CHECK_THROWS_WITH(build_lag_design(two_var(3), 0), "invalid lag");
  CHECK_THROWS_WITH(build_lag_design(two_var(3), 3), "insufficient history");
}

TEST_CASE("lag design reassembly recovers every value once per slot") {
  const Matrix v = random_matrix(30, 3, 11);
  for (int p : {1, 2, 5}) {
    const LagDesign d = build_lag_design(v, p);
    for (Eigen::Index r = 0; r < d.inputs.rows(); ++r) {
      const Eigen::Index t = r + p;
      CHECK(d.targets.row(r) == v.row(t));
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        for (int l = 1; l <= p; ++l) CHECK(d.inputs(r, j * p + l - 1) == v(t - l, j));
    }
  }
}

TEST_CASE("split boundaries") {
  Matrix v(870, 1);
  for (int t = 0; t < 870; ++t) v(t, 0) = t + 1;
  const auto [train, test] = split_dataset(Dataset({"x"}, v), 850, 20);
  CHECK(train.rows() == 850);
  CHECK(train.values()(849, 0) == 850);
  CHECK(test.values()(0, 0) == 851);
  CHECK(test.values()(19, 0) == 870);

  const auto [a, b] = split_dataset(two_var(3), 2, 1);
  CHECK(a.rows() == 2);
  CHECK(b.values()(0, 0) == 3);
  CHECK_THROWS(split_dataset(two_var(3), 3, 1));
}

TEST_CASE("split then concatenate is bit exact") {
  const Dataset d({"a", "b", "c"}, random_matrix(40, 3, 5));
  for (Eigen::Index k = 1; k < 40; k += 7) {
    const auto [a, b] = split_dataset(d, k, 40 - k);
    const Dataset back = concat_rows(a, b);
    CHECK(back.values() == d.values());
    CHECK(back.names() == d.names());
  }
}

TEST_CASE("scaler uses population sd") {
  Matrix m(3, 1);
  m << 1, 2, 3;
  const Scaler s = fit_scaler(m);
  CHECK(s.means(0) == doctest::Approx(2.0));
  CHECK(s.sds(0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(s.apply(m).mean() == doctest::Approx(0.0));
}

TEST_CASE("constant column keeps sd 1") {
  const Scaler s = fit_scaler(Matrix::Constant(3, 1, 7.0));
  CHECK(s.sds(0) == 1.0);
  CHECK(s.apply(Matrix::Constant(3, 1, 7.0)).isZero());
}

TEST_CASE("scaler round trip") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = random_matrix(25, 4, seed);
    const Scaler s = fit_scaler(m);
    const Matrix back = s.invert(s.apply(m));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double a = m.data()[i], b = back.data()[i];
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
    const Vector row = m.row(3).transpose();
    CHECK((s.invert_row(s.apply_row(row)) - row).cwiseAbs().maxCoeff() < 1e-12 * (1 + row.cwiseAbs().maxCoeff()));
  }
}

}  // TEST_SUITE
