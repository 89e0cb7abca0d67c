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
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rww/domain.hpp"
#include "rww/error.hpp"
#include "rww/bundled_model.hpp"
#include "rww/selection.hpp"
#include "rww/stats.hpp"

namespace rww::pipeline {

/// Design with every control term followed by Q01..Q26, response ln(raised).
inline stats::DesignMatrix build_design(const Dataset& dataset) {
  EncodingMeta meta;
  meta.factor_ids = all_questions();
  std::vector<DesignRow> rows;
  rows.reserve(dataset.size());
  for (const auto& r : dataset.records()) rows.push_back(design_row(r, meta));
  auto design = stats::DesignMatrix::from_rows(rows);
  if (rows.empty()) design.names = meta.term_names();
  return design;
}

// ---------------------------------------------------------------------------
// Screening
// ---------------------------------------------------------------------------

struct FactorScreen {
  QuestionId id;
  double mean_indiegogo = 0.0;
  double mean_kickstarter = 0.0;
  double mean_printer = 0.0;
  double mean_watch = 0.0;
  stats::TTestResult by_platform;
  stats::TTestResult by_category;
  bool platform_significant = false;
  bool category_significant = false;
};

struct ScreeningReport {
  double alpha = 0.05;
  std::vector<FactorScreen> factors;
  std::vector<QuestionId> candidate_pool;
};

namespace detail {

/// Welch test that tolerates two constant groups: equal constants give t = 0, p = 1,
/// different constants an infinite statistic with p = 0.
inline stats::TTestResult robust_welch(const std::vector<double>& a, const std::vector<double>& b) {
  try {
    return stats::welch_t_test(a, b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateSample) throw;
  }
  const double ma = stats::mean_and_variance(a).first;
  const double mb = stats::mean_and_variance(b).first;
  stats::TTestResult r;
  r.degrees_of_freedom = static_cast<double>(a.size() + b.size() - 2);
  if (ma == mb) return r;
  r.t_stat = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  r.p_value = 0.0;
  return r;
}

inline double mean_of(const std::vector<double>& xs) { return stats::mean_and_variance(xs).first; }

}  // namespace detail

/// Keeps the factors whose mean rating differs neither between platforms nor between categories.
inline ScreeningReport screen_factors(const Dataset& dataset, std::span<const QuestionId> factors,
                                      double alpha = 0.05) {
  std::size_t n_ks = 0, n_sw = 0;
  for (const auto& r : dataset.records()) {
    n_ks += r.platform == Platform::Kickstarter;
    n_sw += r.category == Category::SmartWatch;
  }
  const std::size_t n = dataset.size();
  if (n_ks < 2 || n - n_ks < 2 || n_sw < 2 || n - n_sw < 2) {
    throw Error(ErrorCode::SingleGroup, "screening needs at least two campaigns on each platform and category");
  }

  ScreeningReport report;
  report.alpha = alpha;
  for (auto q : factors) {
    std::vector<double> igg, ks, printer, watch;
    for (const auto& r : dataset.records()) {
      const double s = score(r.rating(q));
      (r.platform == Platform::Kickstarter ? ks : igg).push_back(s);
      (r.category == Category::SmartWatch ? watch : printer).push_back(s);
    }
    FactorScreen f;
    f.id = q;
    f.mean_indiegogo = detail::mean_of(igg);
    f.mean_kickstarter = detail::mean_of(ks);
    f.mean_printer = detail::mean_of(printer);
    f.mean_watch = detail::mean_of(watch);
    f.by_platform = detail::robust_welch(igg, ks);
    f.by_category = detail::robust_welch(printer, watch);
    f.platform_significant = f.by_platform.significant_at(alpha);
    f.category_significant = f.by_category.significant_at(alpha);
    if (!f.platform_significant && !f.category_significant) report.candidate_pool.push_back(q);
    report.factors.push_back(f);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Model building
// ---------------------------------------------------------------------------

struct BuildSpec {
  double prevalence_threshold = kDefaultPrevalenceThreshold;
  double alpha = 0.05;
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;
  selection::Direction direction = selection::Direction::Bidirectional;
  selection::ScoreKind score = selection::ScoreKind::CvR2;
  std::size_t max_steps = 100;
  double tolerance = 0.04;  // CV-score gain a move must exceed; see README
  std::string model_name = "baseline";
};

struct BuildResult {
  PrevalenceSplit prevalence;
  std::optional<ScreeningReport> screening;
  std::vector<std::string> forced_terms;
  std::vector<QuestionId> candidates;
  selection::SelectionResult selection;
};

namespace detail {

inline selection::SelectionResult run_selection(const Dataset& dataset, const std::vector<std::string>& forced,
                                                const std::vector<QuestionId>& candidates, const BuildSpec& spec) {
  const auto design = build_design(dataset);
  selection::SelectionSpec sel;
  sel.forced_terms = forced;
  sel.candidate_terms = candidates;
  sel.k_folds = spec.k_folds;
  sel.seed = spec.seed;
  sel.direction = spec.direction;
  sel.score = spec.score;
  sel.max_steps = spec.max_steps;
  sel.tolerance = spec.tolerance;
  auto result = selection::stepwise_select(design, sel);
  result.final_model.name = spec.model_name;
  return result;
}

}  // namespace detail

/// Prevalence filter, then platform/category screening, then stepwise selection with every
/// control and dummy term forced in.
inline BuildResult build_baseline(const Dataset& dataset, const BuildSpec& spec = {}) {
  BuildResult out;
  out.prevalence = factor_prevalence_filter(dataset, spec.prevalence_threshold);
  out.screening = screen_factors(dataset, out.prevalence.kept, spec.alpha);
  out.forced_terms = default_control_terms();
  out.candidates = out.screening->candidate_pool;
  out.selection = detail::run_selection(dataset, out.forced_terms, out.candidates, spec);
  return out;
}

enum class SliceKind { Platform, Category };

/// One platform or one product category.
struct SliceBy {
  SliceKind kind = SliceKind::Platform;
  Platform platform = Platform::Kickstarter;
  Category category = Category::ThreeDPrinter;

  bool contains(const CampaignRecord& r) const {
    return kind == SliceKind::Platform ? r.platform == platform : r.category == category;
  }
  std::string_view dropped_term() const { return kind == SliceKind::Platform ? terms::kPlatform : terms::kCategory; }
  std::string label() const {
    return std::string(kind == SliceKind::Platform ? "platform=" : "category=") +
           std::string(kind == SliceKind::Platform ? to_string(platform) : to_string(category));
  }
};

inline Dataset slice_dataset(const Dataset& dataset, const SliceBy& slice) {
  return dataset.filter([&](const CampaignRecord& r) { return slice.contains(r); },
                        dataset.provenance() + " [" + slice.label() + "]");
}

/// Platform- or product-specific model: the baseline critical factors become forced terms and
/// the remaining prevalent factors compete as candidates on the slice alone.
inline BuildResult build_specific(const Dataset& slice_data, const SliceBy& slice,
                                  std::span<const QuestionId> baseline_criticals, const BuildSpec& spec = {}) {
  for (const auto& r : slice_data.records()) {
    if (!slice.contains(r)) {
      throw Error(ErrorCode::InvariantViolation, "campaign " + r.id + " lies outside slice " + slice.label());
    }
  }
  BuildResult out;
  out.prevalence = factor_prevalence_filter(slice_data, spec.prevalence_threshold);
  for (const auto& name : default_control_terms()) {
    if (name != slice.dropped_term()) out.forced_terms.push_back(name);
  }
  for (auto q : baseline_criticals) out.forced_terms.push_back(q.str());
  for (auto q : out.prevalence.kept) {
    if (std::find(baseline_criticals.begin(), baseline_criticals.end(), q) == baseline_criticals.end()) {
      out.candidates.push_back(q);
    }
  }

  const auto design = build_design(slice_data);
  for (const auto& name : out.forced_terms) {
    const auto col = design.x.col(static_cast<Eigen::Index>(design.column(name)));
    if (design.rows() > 0 && (col.array() == col(0)).all()) {
      throw Error(ErrorCode::ConstantColumn, "forced term " + name + " is constant on slice " + slice.label());
    }
  }
  out.selection = detail::run_selection(slice_data, out.forced_terms, out.candidates, spec);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic campaigns
// ---------------------------------------------------------------------------

/// Mean and standard error of one control variable within one platform x category cell.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  friend bool operator==(const MeanSe&, const MeanSe&) = default;
};

/// Summary statistics of one platform x category cell of campaigns.
struct CellCalibration {
  Platform platform = Platform::Kickstarter;
  Category category = Category::ThreeDPrinter;
  std::size_t weight = 1;  // campaigns in the reference sample
  MeanSe goal, characters, figures, tables, videos, rewards;
  double team_intro_rate = 0.5;
  double timeline_rate = 0.5;

  friend bool operator==(const CellCalibration&, const CellCalibration&) = default;
};

/// Reference cells: 47/23 printers/watches on Kickstarter, 31/26 on Indiegogo.
inline std::vector<CellCalibration> reference_cells() {
  return {
      {Platform::Indiegogo, Category::ThreeDPrinter, 31, {67650.19, 33331.21}, {9270.71, 1300.15}, {6.68, 0.98},
       {0.52, 0.20}, {0.84, 0.10}, {7.94, 0.89}, 0.45, 0.32},
      {Platform::Kickstarter, Category::ThreeDPrinter, 47, {70196.64, 12560.61}, {10688.57, 1025.14}, {12.66, 1.19},
       {1.09, 0.24}, {2.34, 0.28}, {12.15, 0.97}, 0.38, 0.43},
      {Platform::Indiegogo, Category::SmartWatch, 26, {131477.85, 30600.81}, {9178.44, 1260.87}, {17.81, 2.72},
       {1.19, 0.34}, {1.62, 0.50}, {9.19, 1.12}, 0.77, 0.69},
      {Platform::Kickstarter, Category::SmartWatch, 23, {84676.13, 12757.22}, {11515.87, 917.60}, {19.17, 1.87},
       {0.35, 0.16}, {1.78, 0.26}, {9.30, 0.87}, 0.59, 0.86},
  };
}

/// Overall mean rating per question in the reference sample. Q26 rounds to 0.03 yet falls below
/// the prevalence threshold, so it is set to 0.025.
inline std::array<double, kQuestionCount> reference_factor_means() {
  return {0.37, 0.01, 0.21, 0.58, 0.46, 0.66, 0.32, 0.49, 0.46, 0.35, 0.24, 0.41, 0.07,
          0.04, 0.14, 0.13, 0.01, 0.15, 0.07, 0.15, 0.09, 0.00, 0.31, 0.25, 0.27, 0.025};
}

struct SynthSpec {
  std::size_t n = 127;
  std::array<double, kQuestionCount> factor_means = reference_factor_means();
  std::vector<CellCalibration> cells = reference_cells();
  double intercept = 0.0;
  TermValues planted;  // term name -> coefficient on the ln(raised) scale
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    for (double m : factor_means) {
      if (!(m >= 0.0 && m <= 1.0)) throw Error(ErrorCode::InvariantViolation, "factor means must lie in [0,1]");
    }
    if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvariantViolation, "noise_sigma must be >= 0");
    if (cells.empty()) throw Error(ErrorCode::InvariantViolation, "at least one calibration cell is required");
    const auto names = EncodingMeta{default_control_terms(), all_questions()}.term_names();
    for (const auto& [name, coef] : planted) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw Error(ErrorCode::TermMismatch, "planted term " + name + " is not a model term");
      }
    }
  }

  std::vector<QuestionId> planted_factors() const {
    std::vector<QuestionId> ids;
    for (const auto& [name, coef] : planted) {
      if (stats::role_of(name) == stats::TermRole::Factor && coef != 0.0) ids.push_back(parse_question_id(name));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  /// Data generated from a fitted model's coefficients.
  static SynthSpec from_model(const stats::FittedModel& model, std::size_t n, double noise_sigma,
                              std::uint64_t seed) {
    SynthSpec s;
    s.n = n;
    s.intercept = model.intercept;
    for (const auto& t : model.terms) s.planted.emplace_back(t.name, t.coefficient);
    s.noise_sigma = noise_sigma;
    s.seed = seed;
    return s;
  }

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Cell sizes proportional to the reference weights (largest remainder), summing to n.
inline std::vector<std::size_t> apportion(std::span<const CellCalibration> cells, std::size_t n) {
  double total = 0.0;
  for (const auto& c : cells) total += static_cast<double>(c.weight);
  std::vector<std::size_t> sizes;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double exact = static_cast<double>(n) * static_cast<double>(cells[i].weight) / total;
    sizes.push_back(static_cast<std::size_t>(std::floor(exact)));
    assigned += sizes.back();
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](auto a, auto b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[remainders[i % remainders.size()].second];
  return sizes;
}

/// Log-normal parameters matching a mean and a standard deviation.
inline std::pair<double, double> lognormal_params(double mean, double sd) {
  const double s2 = std::log(1.0 + (sd * sd) / (mean * mean));
  return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
}

}  // namespace detail

/// Deterministic synthetic dataset.
///
/// Ratings: within each platform x category cell a per-campaign latent uniform is ranked and the
/// top round(m^2 n) campaigns get Full, the next ones Partial, so that the cell's total score is
/// m n rounded to the half-point grid. Every cell therefore carries (up to rounding) the same mean
/// for every factor. Controls: rounded, clamped normal draws for counts, Bernoulli flags, and
/// log-normal goal and text length, all from the cell's calibration. Response: intercept plus the
/// planted linear combination plus Gaussian noise, exponentiated to a funding amount.
inline Dataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const auto sizes = detail::apportion(spec.cells, spec.n);
  std::vector<CampaignRecord> records;
  records.reserve(spec.n);

  for (std::size_t c = 0; c < spec.cells.size(); ++c) {
    const auto& cell = spec.cells[c];
    const std::size_t size = sizes[c];
    const double cell_n = static_cast<double>(cell.weight);
    auto draw_count = [&](const MeanSe& ms) {
      const double sd = ms.se * std::sqrt(cell_n);
      return std::max(0L, std::lround(ms.mean + sd * normal(rng)));
    };
    auto draw_lognormal = [&](const MeanSe& ms) {
      const auto [mu, sigma] = detail::lognormal_params(ms.mean, ms.se * std::sqrt(cell_n));
      return std::exp(mu + sigma * normal(rng));
    };

    const std::size_t first = records.size();
    for (std::size_t i = 0; i < size; ++i) {
      CampaignRecord r;
      r.platform = cell.platform;
      r.category = cell.category;
      r.controls.figures = draw_count(cell.figures);
      r.controls.tables = draw_count(cell.tables);
      r.controls.videos = draw_count(cell.videos);
      r.controls.rewards = draw_count(cell.rewards);
      r.controls.team_intro = uniform(rng) < cell.team_intro_rate;
      r.controls.timeline = uniform(rng) < cell.timeline_rate;
      r.controls.goal = std::max(1.0, std::round(draw_lognormal(cell.goal)));
      r.controls.characters = std::max(1L, std::lround(draw_lognormal(cell.characters)));
      r.ratings.fill(Rating::None);
      records.push_back(std::move(r));
    }

    for (auto q : all_questions()) {
      const double m = spec.factor_means[q.slot()];
      const double n_cell = static_cast<double>(size);
      const auto full = static_cast<std::size_t>(std::lround(m * m * n_cell));
      const long halves = std::lround(2.0 * m * n_cell) - 2 * static_cast<long>(full);
      const auto partial = static_cast<std::size_t>(std::clamp(halves, 0L, static_cast<long>(size - full)));
      std::vector<std::pair<double, std::size_t>> latent;
      for (std::size_t i = 0; i < size; ++i) latent.emplace_back(uniform(rng), first + i);
      std::sort(latent.begin(), latent.end(), std::greater<>());
      for (std::size_t i = 0; i < size; ++i) {
        const Rating rating = i < full ? Rating::Full : (i < full + partial ? Rating::Partial : Rating::None);
        records[latent[i].second].ratings[q.slot()] = rating;
      }
    }
  }

  std::shuffle(records.begin(), records.end(), rng);
  const EncodingMeta meta{default_control_terms(), all_questions()};
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    char id[32];
    std::snprintf(id, sizeof id, "syn-%05zu", i + 1);
    r.id = id;
    r.title = "Synthetic campaign " + std::to_string(i + 1);
    const auto row = encode_regressors(r.ratings, r.controls, r.platform, r.category, meta);
    double y = spec.intercept;
    for (const auto& [name, coef] : spec.planted) {
      auto it = std::find_if(row.begin(), row.end(), [&](const auto& kv) { return kv.first == name; });
      y += coef * it->second;
    }
    y += spec.noise_sigma * normal(rng);
    r.funding_raised = std::exp(y);
  }
  return Dataset(std::move(records), "synthetic seed=" + std::to_string(spec.seed));
}

// ---------------------------------------------------------------------------
// Planted-model recovery
// ---------------------------------------------------------------------------

struct RecoveryReport {
  std::size_t trials = 0;
  std::vector<QuestionId> planted;
  double recall = 0.0;       // fraction of trials with selected >= planted
  double exact_match = 0.0;  // fraction of trials with selected == planted
  std::array<double, kQuestionCount> selection_rate{};
};

/// Seed of trial `t`, derived from the base seed only so serial and parallel runs agree.
inline std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  return detail::splitmix64(base ^ detail::splitmix64(static_cast<std::uint64_t>(trial)));
}

inline RecoveryReport recovery_experiment(const SynthSpec& spec, std::size_t trials, BuildSpec build = {}) {
  if (trials < 1) throw Error(ErrorCode::InvariantViolation, "trials must be >= 1");
  RecoveryReport report;
  report.trials = trials;
  report.planted = spec.planted_factors();
  std::size_t superset = 0, exact = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    SynthSpec trial = spec;
    trial.seed = trial_seed(spec.seed, t);
    build.seed = trial.seed;
    const auto result = build_baseline(generate_synthetic(trial), build);
    const auto& selected = result.selection.selected;
    const bool covers = std::includes(selected.begin(), selected.end(), report.planted.begin(), report.planted.end());
    superset += covers;
    exact += covers && selected.size() == report.planted.size();
    for (auto q : selected) report.selection_rate[q.slot()] += 1.0;
  }
  const double n = static_cast<double>(trials);
  report.recall = static_cast<double>(superset) / n;
  report.exact_match = static_cast<double>(exact) / n;
  for (auto& r : report.selection_rate) r /= n;
  return report;
}

}  // namespace rww::pipeline
