// Copyright 2026 The rww-crowdfund Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rww/bundled_model.hpp"
#include "rww/stats.hpp"

namespace rww::stats {
namespace {

using Matrix = std::vector<std::vector<double>>;

// Naive Gauss-Jordan inverse with partial pivoting; small, dense, and unrelated to the library's QR path.
Matrix invert(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

struct NormalEquations {
  std::vector<double> beta;
  Matrix xtx_inv;
  double sse = 0.0;
};

/// Solves (X'X) b = X'y with an explicit inverse; X gets a leading ones column.
NormalEquations normal_equations(const Matrix& rows, const std::vector<double>& y) {
  const std::size_t n = rows.size(), m = rows.front().size() + 1;
  Matrix xtx(m, std::vector<double>(m, 0.0));
  std::vector<double> xty(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x{1.0};
    x.insert(x.end(), rows[i].begin(), rows[i].end());
    for (std::size_t a = 0; a < m; ++a) {
      xty[a] += x[a] * y[i];
      for (std::size_t b = 0; b < m; ++b) xtx[a][b] += x[a] * x[b];
    }
  }
  NormalEquations out;
  out.xtx_inv = invert(xtx);
  out.beta.assign(m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) out.beta[a] += out.xtx_inv[a][b] * xty[b];
  for (std::size_t i = 0; i < n; ++i) {
    double fit = out.beta[0];
    for (std::size_t j = 0; j + 1 < m; ++j) fit += out.beta[j + 1] * rows[i][j];
    out.sse += (y[i] - fit) * (y[i] - fit);
  }
  return out;
}

DesignMatrix make_design(const Matrix& rows, const std::vector<double>& y) {
  DesignMatrix d;
  for (std::size_t j = 0; j < rows.front().size(); ++j) d.names.push_back("x" + std::to_string(j));
  d.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    d.y(static_cast<Eigen::Index>(i)) = y[i];
  }
  return d;
}

/// Random design with n rows and p columns, response linear plus noise.
std::pair<Matrix, std::vector<double>> random_problem(std::mt19937_64& rng, std::size_t n, std::size_t p) {
  std::normal_distribution<double> g;
  Matrix rows(n, std::vector<double>(p));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 0.3;
    for (std::size_t j = 0; j < p; ++j) {
      rows[i][j] = g(rng);
      y[i] += (0.5 + static_cast<double>(j)) * rows[i][j];
    }
    y[i] += g(rng);
  }
  return {rows, y};
}

// Student-t density and a Simpson-rule CDF, used as an oracle for the library's incomplete-beta path.
double t_density(double x, double df) {
  const double c = std::exp(std::lgamma(0.5 * (df + 1)) - std::lgamma(0.5 * df)) / std::sqrt(df * std::numbers::pi);
  return c * std::pow(1.0 + x * x / df, -0.5 * (df + 1));
}

double simpson_cdf(double t, double df) {
  const int steps = 20000;
  const double h = t / steps;
  double s = t_density(0, df) + t_density(t, df);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * t_density(i * h, df);
  return 0.5 + s * h / 3.0;
}

double simpson_quantile(double p, double df) {
  double lo = 0.0, hi = 50.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (simpson_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

TEST(Ols, ThreePointFixtureMatchesNormalEquations) {
  const Matrix rows = {{0}, {1}, {2}};
  const std::vector<double> y = {1, 2, 4};
  const auto oracle = normal_equations(rows, y);
  const auto m = ols_fit(make_design(rows, y));
  EXPECT_NEAR(m.intercept, oracle.beta[0], 1e-12);
  EXPECT_NEAR(m.terms[0].coefficient, oracle.beta[1], 1e-12);
  EXPECT_NEAR(m.intercept, 0.8333, 1e-4);
  EXPECT_NEAR(m.terms[0].coefficient, 1.5, 1e-4);
  EXPECT_NEAR(m.r2, 0.96429, 1e-4);
  EXPECT_EQ(m.n, 3u);
  EXPECT_EQ(m.p, 1u);
}

TEST(Ols, ExactLineHasUnitR2) {
  const auto m = ols_fit(make_design({{0}, {1}, {2}}, {0, 1, 2}));
  EXPECT_NEAR(m.intercept, 0.0, 1e-9);
  EXPECT_NEAR(m.terms[0].coefficient, 1.0, 1e-9);
  EXPECT_NEAR(m.r2, 1.0, 1e-9);
  const auto m2 = ols_fit(make_design({{0}, {1}, {2}, {3}}, {1, 3, 5, 7}));
  EXPECT_NEAR(m2.intercept, 1.0, 1e-12);
  EXPECT_NEAR(m2.terms[0].coefficient, 2.0, 1e-12);
}

TEST(Ols, StandardErrorsAndPValuesMatchOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [rows, y] = random_problem(rng, 30, 4);
    const auto oracle = normal_equations(rows, y);
    const auto m = ols_fit(make_design(rows, y));
    const double dof = 30 - 5;
    const double sigma2 = oracle.sse / dof;
    EXPECT_NEAR(*m.residual_sigma, std::sqrt(sigma2), 1e-9);
    EXPECT_NEAR(*m.intercept_std_error, std::sqrt(sigma2 * oracle.xtx_inv[0][0]), 1e-9);
    for (std::size_t j = 0; j < 4; ++j) {
      const double se = std::sqrt(sigma2 * oracle.xtx_inv[j + 1][j + 1]);
      EXPECT_NEAR(m.terms[j].coefficient, oracle.beta[j + 1], 1e-9);
      EXPECT_NEAR(*m.terms[j].std_error, se, 1e-9);
      const double t = std::abs(oracle.beta[j + 1] / se);
      EXPECT_NEAR(*m.terms[j].p_value, 2.0 * (1.0 - simpson_cdf(t, dof)), 1e-6);
      EXPECT_GE(*m.terms[j].p_value, 0.0);
      EXPECT_LE(*m.terms[j].p_value, 1.0);
    }
  }
}

TEST(Ols, DuplicateColumnIsRankDeficient) {
  const Matrix rows = {{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  try {
    ols_fit(make_design(rows, {1, 2, 2, 5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    EXPECT_TRUE(is_numerical(e.code()));
  }
}

TEST(Ols, TooFewRowsIsUnderdetermined) {
  try {
    ols_fit(make_design({{1}, {2}}, {1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Underdetermined);
  }
}

TEST(OlsProperty, ResidualsOrthogonalToEveryColumn) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 25; ++trial) {
    const auto [rows, y] = random_problem(rng, 40, 5);
    const auto m = ols_fit(make_design(rows, y));
    double sum_resid = 0.0;
    std::vector<double> dots(5, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double fit = m.intercept;
      for (std::size_t j = 0; j < 5; ++j) fit += m.terms[j].coefficient * rows[i][j];
      const double r = y[i] - fit;
      sum_resid += r;
      for (std::size_t j = 0; j < 5; ++j) dots[j] += r * rows[i][j];
    }
    EXPECT_NEAR(sum_resid, 0.0, 1e-9);
    for (double d : dots) EXPECT_NEAR(d, 0.0, 1e-9);
  }
}

TEST(OlsProperty, InvariantUnderRowPermutation) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    auto [rows, y] = random_problem(rng, 25, 3);
    const auto a = ols_fit(make_design(rows, y));
    std::vector<std::size_t> perm(rows.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix rows2;
    std::vector<double> y2;
    for (auto i : perm) {
      rows2.push_back(rows[i]);
      y2.push_back(y[i]);
    }
    const auto b = ols_fit(make_design(rows2, y2));
    EXPECT_NEAR(a.intercept, b.intercept, 1e-10);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a.terms[j].coefficient, b.terms[j].coefficient, 1e-10);
    EXPECT_NEAR(a.r2, b.r2, 1e-10);
  }
}

TEST(OlsProperty, R2NeverDecreasesWhenAddingAColumn) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [rows, y] = random_problem(rng, 20, 6);
    const auto d = make_design(rows, y);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 6; ++k) {
      std::vector<std::size_t> cols(k);
      std::iota(cols.begin(), cols.end(), 0);
      const auto m = ols_fit(d, cols);
      EXPECT_GE(m.r2, prev - 1e-12);
      EXPECT_LE(m.r2, 1.0 + 1e-12);
      EXPECT_NEAR(m.adj_r2, 1.0 - (1.0 - m.r2) * 19.0 / (19.0 - static_cast<double>(k)), 1e-12);
      prev = m.r2;
    }
  }
}

TEST(AdjustedR2, Fixtures) {
  EXPECT_NEAR(adjusted_r2(0.635, 127, 15), 0.5857, 1e-3);
  EXPECT_EQ(adjusted_r2(1.0, 50, 5), 1.0);
  EXPECT_NEAR(adjusted_r2(0.0, 10, 2), -0.2857, 1e-4);
  try {
    adjusted_r2(0.5, 5, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateDoF);
  }
}

TermValues fixture_regressors() {
  TermValues v;
  for (auto name : terms::kControlOrder) {
    const bool one = name == terms::kCategory || name == terms::kPlatform;
    v.emplace_back(std::string(name), one ? 1.0 : 0.0);
  }
  for (auto q : {"Q01", "Q08", "Q12", "Q16", "Q25"}) v.emplace_back(q, 1.0);
  return v;
}

TEST(Predict, BundledModelFixture) {
  const auto model = bundled_baseline_model();
  const auto r = predict(model, fixture_regressors());
  // 1.97 + 0.62 - 1.01 + 2.09 + 1.29 + 1.91 + 1.67 + 1.31
  EXPECT_NEAR(r.ln_amount, 9.85, 1e-12);
  EXPECT_NEAR(r.amount, std::exp(9.85), 1e-6);
  double sum = model.intercept;
  for (const auto& [name, c] : r.contributions) sum += c;
  EXPECT_NEAR(sum, r.ln_amount, 1e-12);
  EXPECT_FALSE(predict(model, fixture_regressors(), 0.95).interval.has_value());
}

TEST(Predict, ZeroRegressorsGiveIntercept) {
  const auto model = bundled_baseline_model();
  auto v = fixture_regressors();
  for (auto& kv : v) kv.second = 0.0;
  EXPECT_NEAR(predict(model, v).ln_amount, 1.97, 1e-12);
}

TEST(Predict, TermMismatch) {
  auto v = fixture_regressors();
  std::swap(v[0], v[1]);
  try {
    predict(bundled_baseline_model(), v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TermMismatch);
  }
  v.pop_back();
  EXPECT_THROW(predict(bundled_baseline_model(), v), Error);
}

TEST(PredictProperty, LinearInEachRegressor) {
  const auto model = bundled_baseline_model();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    auto v = fixture_regressors();
    for (auto& kv : v) kv.second = u(rng);
    const auto j = static_cast<std::size_t>(trial) % v.size();
    const double delta = u(rng);
    auto w = v;
    w[j].second += delta;
    EXPECT_NEAR(predict(model, w).ln_amount - predict(model, v).ln_amount, model.terms[j].coefficient * delta, 1e-9);
  }
}

TEST(PredictProperty, AffineCombinationOfInputs) {
  const auto model = bundled_baseline_model();
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = fixture_regressors(), y = fixture_regressors(), z = fixture_regressors();
    const double a = u(rng), b = u(rng);
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j].second = u(rng);
      y[j].second = u(rng);
      z[j].second = a * x[j].second + b * y[j].second;
    }
    const double expected =
        a * predict(model, x).ln_amount + b * predict(model, y).ln_amount - (a + b - 1) * model.intercept;
    EXPECT_NEAR(predict(model, z).ln_amount, expected, 1e-9);
  }
}

TEST(Predict, IntervalMatchesSimpleRegressionFormula) {
  const Matrix rows = {{1}, {2}, {3}, {4}, {5}, {6}};
  const std::vector<double> y = {1.1, 1.9, 3.2, 3.8, 5.3, 5.9};
  const auto m = ols_fit(make_design(rows, y));
  const double x0 = 4.5, n = 6, xbar = 3.5, sxx = 17.5;
  const auto oracle = normal_equations(rows, y);
  const double s = std::sqrt(oracle.sse / (n - 2));
  const double half = simpson_quantile(0.975, n - 2) * s * std::sqrt(1 + 1 / n + (x0 - xbar) * (x0 - xbar) / sxx);
  const auto r = predict(m, {{"x0", x0}}, 0.95);
  ASSERT_TRUE(r.interval.has_value());
  EXPECT_NEAR(r.interval->lower, r.ln_amount - half, 1e-6);
  EXPECT_NEAR(r.interval->upper, r.ln_amount + half, 1e-6);
}

TEST(PredictProperty, IntervalBracketsPointAndWidensWithLevel) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const auto [rows, y] = random_problem(rng, 30, 3);
    const auto m = ols_fit(make_design(rows, y));
    const TermValues x{{"x0", g(rng)}, {"x1", g(rng)}, {"x2", g(rng)}};
    const auto narrow = predict(m, x, 0.8);
    const auto wide = predict(m, x, 0.95);
    EXPECT_LT(narrow.interval->lower, narrow.ln_amount);
    EXPECT_GT(narrow.interval->upper, narrow.ln_amount);
    EXPECT_LT(wide.interval->lower, narrow.interval->lower);
    EXPECT_GT(wide.interval->upper, narrow.interval->upper);
  }
}

TEST(StudentT, QuantileAgainstIntegratedDensity) {
  EXPECT_NEAR(t_quantile(0.975, 4), 2.776, 1e-3);
  EXPECT_NEAR(t_quantile(0.975, 4), simpson_quantile(0.975, 4), 1e-7);
  EXPECT_NEAR(t_quantile(0.95, 10), simpson_quantile(0.95, 10), 1e-7);
  EXPECT_NEAR(t_quantile(0.995, 2.5), simpson_quantile(0.995, 2.5), 1e-6);
  EXPECT_EQ(t_quantile(0.5, 7), 0.0);
  // Normal limit: Phi^{-1}(0.975).
  EXPECT_NEAR(t_quantile(0.975, 1e6), 1.959963984540054, 1e-3);
}

TEST(StudentT, CdfAgainstIntegratedDensity) {
  for (double df : {1.0, 3.0, 7.5, 30.0}) {
    for (double t : {0.1, 0.7, 1.5, 3.0}) {
      EXPECT_NEAR(t_cdf(t, df), simpson_cdf(t, df), 1e-9) << t << " " << df;
      EXPECT_NEAR(t_cdf(-t, df), 1.0 - simpson_cdf(t, df), 1e-9);
    }
  }
}

TEST(StudentTProperty, QuantileInvertsCdf) {
  for (double df : {1.0, 2.0, 5.0, 17.0, 125.0}) {
    for (double p = 0.01; p < 0.995; p += 0.01) EXPECT_NEAR(t_cdf(t_quantile(p, df), df), p, 1e-9);
  }
}

TEST(Welch, SmallSampleFixture) {
  const std::vector<double> a = {1, 2, 3}, b = {2, 3, 4};
  const auto r = welch_t_test(a, b);
  EXPECT_NEAR(r.t_stat, -1.2247, 1e-4);
  EXPECT_NEAR(r.degrees_of_freedom, 4.0, 1e-9);
  EXPECT_NEAR(r.p_value, 0.2878, 1e-4);
  EXPECT_NEAR(r.p_value, 2.0 * (1.0 - simpson_cdf(1.224744871391589, 4)), 1e-9);
}

TEST(Welch, IdenticalSamples) {
  const std::vector<double> a = {1, 4, 2, 8};
  const auto r = welch_t_test(a, a);
  EXPECT_EQ(r.t_stat, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(Welch, PlatformSummaryForTeamCompetency) {
  // Indiegogo (n=57) vs Kickstarter (n=70) means and standard errors for Q21.
  const auto r = welch_t_test_summary(0.01, 0.01, 57, 0.16, 0.03, 70);
  EXPECT_NEAR(std::abs(r.t_stat), 0.15 / std::sqrt(0.01 * 0.01 + 0.03 * 0.03), 1e-12);
  EXPECT_NEAR(std::abs(r.t_stat), 4.74, 0.01);
  EXPECT_TRUE(r.significant_at(0.05));
}

TEST(WelchProperty, AntisymmetricInArguments) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(5 + trial % 7), b(3 + trial % 11);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng) + 0.5;
    const auto ab = welch_t_test(a, b), ba = welch_t_test(b, a);
    EXPECT_NEAR(ab.t_stat, -ba.t_stat, 1e-12);
    EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
    EXPECT_GE(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

TEST(Welch, DegenerateSamples) {
  const std::vector<double> one = {1.0}, two = {1.0, 2.0}, flat = {3.0, 3.0};
  EXPECT_THROW(welch_t_test(one, two), Error);
  try {
    welch_t_test(flat, flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSample);
  }
}

TEST(Kappa, LinearWeightedFixture) {
  const std::vector<Rating> a = {Rating::None, Rating::Partial, Rating::Full, Rating::Full};
  const std::vector<Rating> b = {Rating::None, Rating::Partial, Rating::Full, Rating::Partial};
  const auto m = AgreementMatrix::from_ratings(a, b);
  // Po = 0.875 and Pe = 0.5625 by hand.
  EXPECT_NEAR(cohen_kappa(m, KappaWeighting::Linear), (0.875 - 0.5625) / (1 - 0.5625), 1e-12);
  EXPECT_NEAR(cohen_kappa(m, KappaWeighting::Linear), 0.7143, 1e-4);
  EXPECT_TRUE(kappa_below_gate(cohen_kappa(m, KappaWeighting::Linear)));
  EXPECT_FALSE(kappa_below_gate(0.80));
}

TEST(Kappa, PerfectAndChanceAgreement) {
  AgreementMatrix diag;
  diag.counts = {{{5, 0, 0}, {0, 3, 0}, {0, 0, 4}}};
  EXPECT_NEAR(cohen_kappa(diag, KappaWeighting::Linear), 1.0, 1e-12);
  EXPECT_NEAR(cohen_kappa(diag, KappaWeighting::Unweighted), 1.0, 1e-12);
  // Outer product of marginals (2,1,1) x (1,2,1): observed equals expected.
  AgreementMatrix indep;
  indep.counts = {{{2, 4, 2}, {1, 2, 1}, {1, 2, 1}}};
  EXPECT_NEAR(cohen_kappa(indep, KappaWeighting::Linear), 0.0, 1e-12);
  EXPECT_NEAR(cohen_kappa(indep, KappaWeighting::Unweighted), 0.0, 1e-12);
  EXPECT_THROW(cohen_kappa(AgreementMatrix{}, KappaWeighting::Linear), Error);
}

TEST(Kappa, UnweightedMatchesHandComputation) {
  AgreementMatrix m;
  m.counts = {{{10, 2, 0}, {1, 8, 1}, {0, 2, 6}}};
  // po = 24/30; pe = (12*11 + 10*12 + 8*7) / 900.
  const double po = 24.0 / 30.0, pe = (12.0 * 11 + 10.0 * 12 + 8.0 * 7) / 900.0;
  EXPECT_NEAR(cohen_kappa(m, KappaWeighting::Unweighted), (po - pe) / (1 - pe), 1e-12);
}

TEST(KappaProperty, BoundedAboveByOne) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> u(0, 9);
  for (int trial = 0; trial < 500; ++trial) {
    AgreementMatrix m;
    for (auto& row : m.counts)
      for (auto& c : row) c = u(rng);
    if (m.total() == 0) continue;
    EXPECT_LE(cohen_kappa(m, KappaWeighting::Linear), 1.0 + 1e-12);
    EXPECT_LE(cohen_kappa(m, KappaWeighting::Unweighted), 1.0 + 1e-12);
  }
}

TEST(Kappa, FromRatings) {
  const std::vector<Rating> a = {Rating::None, Rating::Full, Rating::Partial};
  const std::vector<Rating> b = {Rating::None, Rating::Partial, Rating::Partial};
  const auto m = AgreementMatrix::from_ratings(a, b);
  EXPECT_EQ(m.counts[0][0], 1);
  EXPECT_EQ(m.counts[2][1], 1);
  EXPECT_EQ(m.counts[1][1], 1);
  EXPECT_EQ(m.total(), 3);
}

}  // namespace
}  // namespace rww::stats
