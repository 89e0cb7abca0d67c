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
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rww/domain.hpp"
#include "rww/error.hpp"
#include "rww/stats.hpp"

namespace rww::selection {

using Folds = std::vector<std::vector<std::size_t>>;

/// Deterministic shuffled K-fold partition of 0..n-1; fold sizes differ by at most one.
inline Folds kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw Error(ErrorCode::BadK, "need 2 <= k <= n, got k=" + std::to_string(k) + " n=" + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Folds folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

inline constexpr double kDisqualified = -std::numeric_limits<double>::infinity();

/// Out-of-fold R^2 for each fold (SST about the hold-out mean). Returns an empty
/// vector when any training fit is rank deficient.
inline std::vector<double> fold_r2(const stats::DesignMatrix& design, std::span<const std::size_t> cols,
                                   const Folds& folds) {
  std::vector<double> scores;
  scores.reserve(folds.size());
  std::vector<char> held(design.rows());
  for (const auto& holdout : folds) {
    std::fill(held.begin(), held.end(), 0);
    for (auto i : holdout) held[i] = 1;
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < design.rows(); ++i) (held[i] ? test : train).push_back(static_cast<Eigen::Index>(i));

    const Eigen::MatrixXd a = stats::detail::assemble(design.x, cols, train, true);
    Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) y(static_cast<Eigen::Index>(i)) = design.y(train[i]);

    stats::detail::LeastSquares ls;
    try {
      ls = stats::detail::solve(a, y, false);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::RankDeficient) return {};
      throw;
    }

    const Eigen::MatrixXd b = stats::detail::assemble(design.x, cols, test, true);
    Eigen::VectorXd yt(static_cast<Eigen::Index>(test.size()));
    for (std::size_t i = 0; i < test.size(); ++i) yt(static_cast<Eigen::Index>(i)) = design.y(test[i]);
    const double sse = (yt - b * ls.beta).squaredNorm();
    const double sst = (yt.array() - yt.mean()).square().sum();
    scores.push_back(stats::r_squared(sse, sst));
  }
  return scores;
}

/// Mean out-of-fold R^2 of the model with the given design columns; -inf if disqualified.
inline double cv_score(const stats::DesignMatrix& design, std::span<const std::size_t> cols, const Folds& folds) {
  const auto scores = fold_r2(design, cols, folds);
  if (scores.empty()) return kDisqualified;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

/// Column layout shared by every search path: non-factor forced terms in the given order,
/// then every factor column (forced or chosen) by ascending question index.
inline std::vector<std::size_t> model_columns(const stats::DesignMatrix& design,
                                              std::span<const std::string> forced_terms,
                                              std::span<const QuestionId> factors) {
  std::vector<std::size_t> cols;
  std::vector<QuestionId> all_factors(factors.begin(), factors.end());
  for (const auto& name : forced_terms) {
    if (stats::role_of(name) == stats::TermRole::Factor) {
      all_factors.push_back(parse_question_id(name));
    } else {
      cols.push_back(design.column(name));
    }
  }
  std::sort(all_factors.begin(), all_factors.end());
  all_factors.erase(std::unique(all_factors.begin(), all_factors.end()), all_factors.end());
  for (auto q : all_factors) cols.push_back(design.column(q.str()));
  return cols;
}

inline double cv_score(const stats::DesignMatrix& design, std::span<const std::string> forced_terms,
                       std::span<const QuestionId> factor_subset, const Folds& folds) {
  return cv_score(design, model_columns(design, forced_terms, factor_subset), folds);
}

enum class Direction { Forward, Backward, Bidirectional };
enum class ScoreKind { CvR2, InSampleAdjR2 };

struct SelectionSpec {
  std::vector<std::string> forced_terms;
  std::vector<QuestionId> candidate_terms;
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;
  Direction direction = Direction::Bidirectional;
  ScoreKind score = ScoreKind::CvR2;
  std::size_t max_steps = 100;
  double tolerance = 1e-6;

  void validate() const {
    for (auto q : candidate_terms) {
      for (const auto& f : forced_terms) {
        if (f == q.str()) throw Error(ErrorCode::InvariantViolation, q.str() + " is both forced and a candidate");
      }
    }
    if (k_folds < 2) throw Error(ErrorCode::BadK, "k_folds must be >= 2");
  }
};

enum class Action { Add, Remove };

struct TraceStep {
  std::size_t step = 0;
  Action action = Action::Add;
  QuestionId term;
  double score_before = 0.0;
  double score_after = 0.0;
};

struct SelectionResult {
  std::vector<QuestionId> selected;  // ascending question index
  std::vector<TraceStep> trace;
  std::vector<double> fold_scores;
  double score = 0.0;
  stats::FittedModel final_model;
};

/// Called with the term names of every model the search scores.
using VisitObserver = std::function<void(const std::vector<std::string>&)>;

namespace detail {

/// Scores equal within this margin are ties, resolved by model size then question index.
inline constexpr double kTieMargin = 1e-12;

inline double score_model(const stats::DesignMatrix& design, std::span<const std::size_t> cols, const Folds& folds,
                          ScoreKind kind) {
  if (kind == ScoreKind::CvR2) return cv_score(design, cols, folds);
  try {
    return stats::ols_fit(design, cols).adj_r2;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) return kDisqualified;
    throw;
  }
}

inline void notify(const VisitObserver& observer, const stats::DesignMatrix& design,
                   std::span<const std::size_t> cols) {
  if (!observer) return;
  std::vector<std::string> names;
  for (auto c : cols) names.push_back(design.names[c]);
  observer(names);
}

}  // namespace detail

/// Greedy stepwise search over candidate factors with the forced terms present in every model.
///
/// Each step scores every single addition (Forward, Bidirectional) and every single removal of a
/// chosen factor (Backward, Bidirectional), then applies the best move if it beats the current
/// score by more than `spec.tolerance`. Ties go to the smaller model, then to the lower question
/// index. Backward starts from all candidates; the other directions start from the forced terms.
inline SelectionResult stepwise_select(const stats::DesignMatrix& design, const SelectionSpec& spec,
                                       const VisitObserver& observer = {}) {
  spec.validate();
  const Folds folds = kfold_split(design.rows(), spec.k_folds, spec.seed);

  std::vector<QuestionId> candidates = spec.candidate_terms;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<QuestionId> chosen;
  if (spec.direction == Direction::Backward) chosen = candidates;

  auto evaluate = [&](const std::vector<QuestionId>& subset) {
    const auto cols = model_columns(design, spec.forced_terms, subset);
    detail::notify(observer, design, cols);
    return detail::score_model(design, cols, folds, spec.score);
  };

  SelectionResult result;
  double current = evaluate(chosen);

  for (std::size_t step = 0; step < spec.max_steps; ++step) {
    struct Move {
      Action action;
      QuestionId term;
      double score;
      std::size_t size;
    };
    std::optional<Move> best;
    auto consider = [&](Move m) {
      if (!best) {
        best = m;
        return;
      }
      if (m.score > best->score + detail::kTieMargin) {
        best = m;
      } else if (m.score >= best->score - detail::kTieMargin) {
        if (m.size < best->size || (m.size == best->size && m.term < best->term)) best = m;
      }
    };

    if (spec.direction != Direction::Backward) {
      for (auto q : candidates) {
        if (std::find(chosen.begin(), chosen.end(), q) != chosen.end()) continue;
        auto trial = chosen;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), q), q);
        consider({Action::Add, q, evaluate(trial), trial.size()});
      }
    }
    if (spec.direction != Direction::Forward) {
      for (auto q : chosen) {
        auto trial = chosen;
        trial.erase(std::find(trial.begin(), trial.end(), q));
        consider({Action::Remove, q, evaluate(trial), trial.size()});
      }
    }

    if (!best || !(best->score > current + spec.tolerance)) break;

    result.trace.push_back({step, best->action, best->term, current, best->score});
    if (best->action == Action::Add) {
      chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), best->term), best->term);
    } else {
      chosen.erase(std::find(chosen.begin(), chosen.end(), best->term));
    }
    current = best->score;
  }

  const auto cols = model_columns(design, spec.forced_terms, chosen);
  result.selected = chosen;
  result.score = current;
  result.fold_scores = fold_r2(design, cols, folds);
  result.final_model = stats::ols_fit(design, cols);
  return result;
}

inline constexpr std::size_t kMaxExhaustiveCandidates = 15;

struct SubsetScore {
  std::vector<QuestionId> subset;
  double score = kDisqualified;
};

/// Exhaustive search over all 2^m candidate subsets, same scoring and tie-break as stepwise_select.
inline SubsetScore best_subset(const stats::DesignMatrix& design, std::span<const std::string> forced_terms,
                               std::span<const QuestionId> candidate_terms, const Folds& folds) {
  if (candidate_terms.size() > kMaxExhaustiveCandidates) {
    throw Error(ErrorCode::TooManyCandidates,
                std::to_string(candidate_terms.size()) + " candidates exceeds " +
                    std::to_string(kMaxExhaustiveCandidates));
  }
  std::vector<QuestionId> candidates(candidate_terms.begin(), candidate_terms.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  SubsetScore best;
  bool have = false;
  const std::uint32_t count = 1u << candidates.size();
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::vector<QuestionId> subset;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (mask & (1u << i)) subset.push_back(candidates[i]);
    }
    const double s = cv_score(design, forced_terms, subset, folds);
    bool better = !have || s > best.score + detail::kTieMargin;
    if (!better && s >= best.score - detail::kTieMargin) {
      better = subset.size() < best.subset.size() || (subset.size() == best.subset.size() && subset < best.subset);
    }
    if (better) {
      best = {std::move(subset), s};
      have = true;
    }
  }
  return best;
}

}  // namespace rww::selection
