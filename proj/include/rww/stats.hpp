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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

#include "rww/domain.hpp"
#include "rww/error.hpp"

namespace rww::stats {

// ---------------------------------------------------------------------------
// Student-t distribution
// ---------------------------------------------------------------------------

/// Upper tail P(T > t) for t >= 0, via the regularized incomplete beta function.
inline double t_upper_tail(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  // Near zero df / (df + t^2) rounds to 1, so use the complementary argument there.
  const double t2 = t * t;
  const double half_tail = t2 < df ? 0.5 - 0.5 * boost::math::ibeta(0.5, 0.5 * df, t2 / (df + t2))
                                   : 0.5 * boost::math::ibeta(0.5 * df, 0.5, df / (df + t2));
  return t >= 0 ? half_tail : 1.0 - half_tail;
}

inline double t_cdf(double t, double df) {
  if (t < 0) return t_upper_tail(-t, df);
  return 1.0 - t_upper_tail(t, df);
}

/// Two-sided p-value P(|T| > |t|).
inline double t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double p = t2 < df ? boost::math::ibetac(0.5, 0.5 * df, t2 / (df + t2))
                           : boost::math::ibeta(0.5 * df, 0.5, df / (df + t2));
  return std::clamp(p, 0.0, 1.0);
}

/// Inverse CDF. Brackets the root by doubling, then solves with TOMS 748 on t_cdf.
inline double t_quantile(double prob, double df) {
  if (!(prob > 0.0 && prob < 1.0) || !(df > 0.0)) {
    throw Error(ErrorCode::InvariantViolation, "t_quantile requires prob in (0,1) and df > 0");
  }
  if (prob == 0.5) return 0.0;
  if (prob < 0.5) return -t_quantile(1.0 - prob, df);

  // Work with the upper tail so that probabilities close to 1 keep precision.
  const double tail = 1.0 - prob;
  auto f = [&](double t) { return tail - t_upper_tail(t, df); };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  const double lo = hi == 1.0 ? 0.0 : hi / 2.0;
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Welch's t-test
// ---------------------------------------------------------------------------

struct TTestResult {
  double t_stat = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-sided

  /// Significance uses p <= alpha, so alpha = 1 flags every finite statistic.
  bool significant_at(double alpha) const { return p_value <= alpha; }
};

/// Welch test from summary statistics: means, standard errors of the means and sample sizes.
inline TTestResult welch_t_test_summary(double mean_a, double se_a, double n_a, double mean_b, double se_b,
                                        double n_b) {
  const double va = se_a * se_a;
  const double vb = se_b * se_b;
  if (va + vb == 0.0) throw Error(ErrorCode::DegenerateSample, "both samples have zero variance");
  TTestResult r;
  r.t_stat = (mean_a - mean_b) / std::sqrt(va + vb);
  r.degrees_of_freedom = (va + vb) * (va + vb) / (va * va / (n_a - 1.0) + vb * vb / (n_b - 1.0));
  r.p_value = t_two_sided_p(r.t_stat, r.degrees_of_freedom);
  return r;
}

inline std::pair<double, double> mean_and_variance(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

inline TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::DegenerateSample, "each sample needs at least 2 values");
  const auto [ma, va] = mean_and_variance(a);
  const auto [mb, vb] = mean_and_variance(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return welch_t_test_summary(ma, std::sqrt(va / na), na, mb, std::sqrt(vb / nb), nb);
}

// ---------------------------------------------------------------------------
// Cohen's kappa
// ---------------------------------------------------------------------------

/// Cross-tabulation of two raters over {None, Partial, Full}; counts[i][j] is rater 1 = i, rater 2 = j.
struct AgreementMatrix {
  std::array<std::array<long, 3>, 3> counts{};

  long total() const {
    long t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
  }

  static AgreementMatrix from_ratings(std::span<const Rating> rater1, std::span<const Rating> rater2) {
    if (rater1.size() != rater2.size()) {
      throw Error(ErrorCode::InvariantViolation, "raters scored different numbers of items");
    }
    AgreementMatrix m;
    for (std::size_t i = 0; i < rater1.size(); ++i) {
      ++m.counts[static_cast<int>(rater1[i])][static_cast<int>(rater2[i])];
    }
    return m;
  }
};

enum class KappaWeighting { Unweighted, Linear };

/// Chance-corrected agreement (po - pe) / (1 - pe), with agreement weights
/// w_ij = 1 - |i-j|/(k-1) for Linear and the identity for Unweighted.
inline double cohen_kappa(const AgreementMatrix& m, KappaWeighting weighting) {
  constexpr int k = 3;
  const long total = m.total();
  if (total < 1) throw Error(ErrorCode::EmptyMatrix, "agreement matrix has no observations");
  const double n = static_cast<double>(total);

  std::array<double, k> row{}, col{};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      row[i] += m.counts[i][j] / n;
      col[j] += m.counts[i][j] / n;
    }
  }
  auto weight = [&](int i, int j) {
    if (weighting == KappaWeighting::Unweighted) return i == j ? 1.0 : 0.0;
    return 1.0 - std::abs(i - j) / static_cast<double>(k - 1);
  };
  double po = 0.0, pe = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      po += weight(i, j) * m.counts[i][j] / n;
      pe += weight(i, j) * row[i] * col[j];
    }
  }
  if (1.0 - pe <= 1e-15) return po >= 1.0 - 1e-15 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

/// Minimum weighted kappa for a rubric revision to be considered rater independent.
inline constexpr double kKappaGate = 0.80;

/// True when agreement is below the gate and the rubric needs another calibration round.
inline bool kappa_below_gate(double kappa, double gate = kKappaGate) { return kappa < gate; }

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

enum class TermRole { Control, Factor, Dummy };

constexpr std::string_view to_string(TermRole r) {
  switch (r) {
    case TermRole::Control: return "control";
    case TermRole::Factor: return "factor";
    case TermRole::Dummy: return "dummy";
  }
  return "control";
}

inline TermRole role_of(std::string_view name) {
  if (is_dummy_term(name)) return TermRole::Dummy;
  try {
    parse_question_id(name);
    return TermRole::Factor;
  } catch (const Error&) {
    return TermRole::Control;
  }
}

struct TermEstimate {
  std::string name;
  TermRole role = TermRole::Control;
  double coefficient = 0.0;
  std::optional<double> std_error;
  std::optional<double> p_value;

  friend bool operator==(const TermEstimate&, const TermEstimate&) = default;
};

struct FittedModel {
  std::string name;
  bool has_intercept = true;
  double intercept = 0.0;
  std::optional<double> intercept_std_error;
  std::optional<double> intercept_p_value;
  std::vector<TermEstimate> terms;
  std::size_t n = 0;
  std::size_t p = 0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::optional<double> residual_sigma;
  EncodingMeta encoding_meta;
  /// (X'X)^-1 over [intercept, terms...], row-major. Empty when the training design is unknown.
  std::vector<double> unscaled_covariance;

  std::vector<std::string> term_names() const {
    std::vector<std::string> names;
    for (const auto& t : terms) names.push_back(t.name);
    return names;
  }

  std::size_t design_width() const { return terms.size() + (has_intercept ? 1 : 0); }

  friend bool operator==(const FittedModel&, const FittedModel&) = default;
};

/// 1 - (1 - r2)(n - 1)/(n - p - 1).
inline double adjusted_r2(double r2, std::size_t n, std::size_t p) {
  if (n <= p + 1) throw Error(ErrorCode::DegenerateDoF, "adjusted R^2 needs n > p + 1");
  return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

/// Column-oriented design: named regressor columns plus a response vector.
struct DesignMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }

  std::size_t column(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorCode::TermMismatch, "no design column named " + std::string(name));
    return static_cast<std::size_t>(it - names.begin());
  }

  static DesignMatrix from_rows(std::span<const DesignRow> rows) {
    DesignMatrix d;
    if (rows.empty()) return d;
    for (const auto& [name, value] : rows.front().regressors) d.names.push_back(name);
    d.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.names.size()));
    d.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.regressors.size() != d.names.size()) throw Error(ErrorCode::TermMismatch, "ragged design rows");
      for (std::size_t j = 0; j < d.names.size(); ++j) {
        if (r.regressors[j].first != d.names[j]) {
          throw Error(ErrorCode::TermMismatch, "row " + std::to_string(i) + " term order differs at " + d.names[j]);
        }
        d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.regressors[j].second;
      }
      d.y(static_cast<Eigen::Index>(i)) = r.response;
    }
    return d;
  }
};

namespace detail {

inline constexpr double kRankThreshold = 1e-10;

struct LeastSquares {
  Eigen::VectorXd beta;  // intercept first when fitted
  Eigen::MatrixXd unscaled_cov;
  Eigen::VectorXd residuals;
};

inline Eigen::MatrixXd assemble(const Eigen::MatrixXd& x, std::span<const std::size_t> cols,
                                std::span<const Eigen::Index> rows, bool with_intercept) {
  const Eigen::Index offset = with_intercept ? 1 : 0;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()) + offset);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (with_intercept) a(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j) + offset) = x(r, static_cast<Eigen::Index>(cols[j]));
    }
  }
  return a;
}

/// Column-pivoted Householder QR solve. Throws RankDeficient / Underdetermined.
inline LeastSquares solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, bool want_covariance) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  if (n <= m) {
    throw Error(ErrorCode::Underdetermined,
                std::to_string(n) + " rows for " + std::to_string(m) + " coefficients");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.rows(), a.cols());
  qr.setThreshold(kRankThreshold);
  qr.compute(a);
  if (qr.rank() < m) {
    throw Error(ErrorCode::RankDeficient,
                "design has rank " + std::to_string(qr.rank()) + " < " + std::to_string(m) + " columns");
  }
  LeastSquares ls;
  ls.beta = qr.solve(y);
  ls.residuals = y - a * ls.beta;
  if (want_covariance) {
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation();
    ls.unscaled_cov = perm * inner * perm.transpose();
  }
  return ls;
}

inline std::vector<Eigen::Index> all_rows(std::size_t n) {
  std::vector<Eigen::Index> rows(n);
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  return rows;
}

}  // namespace detail

/// Sum-of-squares ratio with the conventions used throughout: a constant response
/// scores 1 when reproduced exactly and 0 otherwise.
inline double r_squared(double sse, double sst) {
  constexpr double tiny = 1e-300;
  if (sst <= tiny) return sse <= 1e-20 ? 1.0 : 0.0;
  return 1.0 - sse / sst;
}

/// Ordinary least squares over the selected design columns with full classical inference.
inline FittedModel ols_fit(const DesignMatrix& design, std::span<const std::size_t> cols, bool with_intercept = true,
                           std::string name = {}) {
  const auto rows = detail::all_rows(design.rows());
  const Eigen::MatrixXd a = detail::assemble(design.x, cols, rows, with_intercept);
  const auto ls = detail::solve(a, design.y, /*want_covariance=*/true);

  const std::size_t n = design.rows();
  const std::size_t p = cols.size();
  const std::size_t dof = n - static_cast<std::size_t>(a.cols());
  const double sse = ls.residuals.squaredNorm();
  const double sst = with_intercept ? (design.y.array() - design.y.mean()).square().sum() : design.y.squaredNorm();
  const double sigma2 = sse / static_cast<double>(dof);

  FittedModel model;
  model.name = std::move(name);
  model.has_intercept = with_intercept;
  model.n = n;
  model.p = p;
  model.r2 = r_squared(sse, sst);
  model.adj_r2 = n > p + 1 ? adjusted_r2(model.r2, n, p) : model.r2;
  model.residual_sigma = std::sqrt(sigma2);

  auto inference = [&](Eigen::Index k) -> std::pair<double, double> {
    const double se = std::sqrt(sigma2 * ls.unscaled_cov(k, k));
    const double coef = ls.beta(k);
    if (se == 0.0) return {se, coef == 0.0 ? 1.0 : 0.0};
    return {se, t_two_sided_p(coef / se, static_cast<double>(dof))};
  };

  const Eigen::Index offset = with_intercept ? 1 : 0;
  if (with_intercept) {
    model.intercept = ls.beta(0);
    std::tie(model.intercept_std_error, model.intercept_p_value) = inference(0);
  }
  model.encoding_meta.control_terms.clear();
  for (std::size_t j = 0; j < p; ++j) {
    const auto k = static_cast<Eigen::Index>(j) + offset;
    const auto& term_name = design.names[cols[j]];
    const auto [se, pv] = inference(k);
    model.terms.push_back({term_name, role_of(term_name), ls.beta(k), se, pv});
    if (role_of(term_name) == TermRole::Factor) {
      model.encoding_meta.factor_ids.push_back(parse_question_id(term_name));
    } else {
      model.encoding_meta.control_terms.push_back(term_name);
    }
  }
  const auto m = ls.unscaled_cov.rows();
  model.unscaled_covariance.resize(static_cast<std::size_t>(m * m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) model.unscaled_covariance[static_cast<std::size_t>(i * m + j)] = ls.unscaled_cov(i, j);
  }
  return model;
}

inline FittedModel ols_fit(const DesignMatrix& design, bool with_intercept = true, std::string name = {}) {
  std::vector<std::size_t> cols(design.names.size());
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return ols_fit(design, cols, with_intercept, std::move(name));
}

inline FittedModel ols_fit(std::span<const DesignRow> rows, bool with_intercept = true) {
  if (rows.empty()) throw Error(ErrorCode::Underdetermined, "no rows");
  return ols_fit(DesignMatrix::from_rows(rows), with_intercept);
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

struct PredictionInterval {
  double level = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct PredictionResult {
  double ln_amount = 0.0;
  double amount = 0.0;
  std::optional<PredictionInterval> interval;
  /// coefficient * value per term, in model order; intercept + sum == ln_amount.
  std::vector<std::pair<std::string, double>> contributions;
};

inline void check_terms(const FittedModel& model, const TermValues& regressors) {
  if (regressors.size() != model.terms.size()) {
    throw Error(ErrorCode::TermMismatch, "model has " + std::to_string(model.terms.size()) + " terms, got " +
                                             std::to_string(regressors.size()));
  }
  for (std::size_t j = 0; j < regressors.size(); ++j) {
    if (regressors[j].first != model.terms[j].name) {
      throw Error(ErrorCode::TermMismatch,
                  "expected term " + model.terms[j].name + " at position " + std::to_string(j) + ", got " +
                      regressors[j].first);
    }
  }
}

/// Point prediction on the ln scale. With `interval_level` and a model that carries its training
/// design, adds a per-point prediction interval: yhat +/- t_{(1+level)/2, n-p-1} * sigma * sqrt(1 + h).
inline PredictionResult predict(const FittedModel& model, const TermValues& regressors,
                                std::optional<double> interval_level = std::nullopt) {
  check_terms(model, regressors);
  PredictionResult out;
  double ln_amount = model.has_intercept ? model.intercept : 0.0;
  for (std::size_t j = 0; j < regressors.size(); ++j) {
    const double c = model.terms[j].coefficient * regressors[j].second;
    out.contributions.emplace_back(model.terms[j].name, c);
    ln_amount += c;
  }
  out.ln_amount = ln_amount;
  out.amount = std::exp(ln_amount);

  const std::size_t m = model.design_width();
  if (interval_level && model.residual_sigma && model.unscaled_covariance.size() == m * m) {
    const double level = *interval_level;
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvariantViolation, "interval level must be in (0,1)");
    std::vector<double> x0;
    if (model.has_intercept) x0.push_back(1.0);
    for (const auto& kv : regressors) x0.push_back(kv.second);
    double leverage = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) leverage += x0[i] * model.unscaled_covariance[i * m + j] * x0[j];
    }
    const double dof = static_cast<double>(model.n - m);
    const double half = t_quantile(0.5 * (1.0 + level), dof) * *model.residual_sigma * std::sqrt(1.0 + leverage);
    out.interval = PredictionInterval{level, ln_amount - half, ln_amount + half};
  }
  return out;
}

}  // namespace rww::stats
