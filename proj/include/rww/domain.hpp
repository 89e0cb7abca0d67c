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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rww/error.hpp"

namespace rww {

// ---------------------------------------------------------------------------
// Ratings
// ---------------------------------------------------------------------------

/// Ordinal evidence level assigned by a rater to one RWW question.
enum class Rating : std::uint8_t { None = 0, Partial = 1, Full = 2 };

constexpr double score(Rating r) { return 0.5 * static_cast<int>(r); }

/// Inverse of score(); only the exact values 0, 0.5 and 1 are legal.
constexpr std::optional<Rating> rating_from_score(double s) {
  if (s == 0.0) return Rating::None;
  if (s == 0.5) return Rating::Partial;
  if (s == 1.0) return Rating::Full;
  return std::nullopt;
}

constexpr std::string_view to_string(Rating r) {
  switch (r) {
    case Rating::None: return "None";
    case Rating::Partial: return "Partial";
    case Rating::Full: return "Full";
  }
  return "None";
}

/// Accepts the literal alphabet "0" | "0.5" | "1" as well as None/Partial/Full.
inline std::optional<Rating> parse_rating(std::string_view text) {
  if (text == "0" || text == "None") return Rating::None;
  if (text == "0.5" || text == "Partial") return Rating::Partial;
  if (text == "1" || text == "Full") return Rating::Full;
  return std::nullopt;
}

/// One step up the ordinal scale; nullopt when already Full.
constexpr std::optional<Rating> next_rating(Rating r) {
  if (r == Rating::Full) return std::nullopt;
  return static_cast<Rating>(static_cast<int>(r) + 1);
}

// ---------------------------------------------------------------------------
// Questions and rubric
// ---------------------------------------------------------------------------

inline constexpr int kQuestionCount = 26;

/// Question identifier Q01..Q26, stored as its 1-based index.
class QuestionId {
 public:
  constexpr QuestionId() = default;
  constexpr explicit QuestionId(int index) : index_(index) {
    if (index < 1 || index > kQuestionCount) throw Error(ErrorCode::UnknownQuestionId, "index " + std::to_string(index));
  }

  constexpr int index() const { return index_; }
  constexpr std::size_t slot() const { return static_cast<std::size_t>(index_ - 1); }

  std::string str() const {
    std::string s = "Q";
    if (index_ < 10) s += '0';
    return s + std::to_string(index_);
  }

  friend constexpr auto operator<=>(QuestionId, QuestionId) = default;

 private:
  int index_ = 1;
};

/// Parses "Q07" or "q07". Throws UnknownQuestionId for anything else.
inline QuestionId parse_question_id(std::string_view text) {
  if (text.size() == 3 && (text[0] == 'Q' || text[0] == 'q') && std::isdigit(static_cast<unsigned char>(text[1])) &&
      std::isdigit(static_cast<unsigned char>(text[2]))) {
    const int index = (text[1] - '0') * 10 + (text[2] - '0');
    if (index >= 1 && index <= kQuestionCount) return QuestionId(index);
  }
  throw Error(ErrorCode::UnknownQuestionId, std::string(text));
}

inline std::vector<QuestionId> all_questions() {
  std::vector<QuestionId> ids;
  for (int i = 1; i <= kQuestionCount; ++i) ids.emplace_back(i);
  return ids;
}

enum class MainCategory { Real, Win, Worth };

enum class Subcategory {
  MarketAttractiveness,
  ProductFeasibility,
  ProductAdvantage,
  TeamCompetency,
  ExpectedReturn,
  StrategicFit,
};

constexpr std::string_view to_string(MainCategory c) {
  switch (c) {
    case MainCategory::Real: return "Real";
    case MainCategory::Win: return "Win";
    case MainCategory::Worth: return "Worth";
  }
  return "Real";
}

constexpr std::string_view to_string(Subcategory c) {
  switch (c) {
    case Subcategory::MarketAttractiveness: return "MarketAttractiveness";
    case Subcategory::ProductFeasibility: return "ProductFeasibility";
    case Subcategory::ProductAdvantage: return "ProductAdvantage";
    case Subcategory::TeamCompetency: return "TeamCompetency";
    case Subcategory::ExpectedReturn: return "ExpectedReturn";
    case Subcategory::StrategicFit: return "StrategicFit";
  }
  return "MarketAttractiveness";
}

/// The fixed category layout of the 26 questions: Real Q01-Q11, Win Q12-Q21, Worth Q22-Q26.
constexpr std::pair<MainCategory, Subcategory> question_category(QuestionId q) {
  const int i = q.index();
  if (i <= 5) return {MainCategory::Real, Subcategory::MarketAttractiveness};
  if (i <= 11) return {MainCategory::Real, Subcategory::ProductFeasibility};
  if (i <= 17) return {MainCategory::Win, Subcategory::ProductAdvantage};
  if (i <= 21) return {MainCategory::Win, Subcategory::TeamCompetency};
  if (i <= 24) return {MainCategory::Worth, Subcategory::ExpectedReturn};
  return {MainCategory::Worth, Subcategory::StrategicFit};
}

struct RubricQuestion {
  QuestionId id;
  MainCategory main_category = MainCategory::Real;
  Subcategory subcategory = Subcategory::MarketAttractiveness;
  std::string question;
  std::string criteria_full;
  std::string criteria_partial;
  std::string criteria_none;

  friend bool operator==(const RubricQuestion&, const RubricQuestion&) = default;
};

/// The 26-question rating rubric. Construction validates count, ordering and category layout.
class Rubric {
 public:
  explicit Rubric(std::vector<RubricQuestion> questions) : questions_(std::move(questions)) {
    if (questions_.size() != kQuestionCount) {
      throw Error(ErrorCode::InvariantViolation,
                  "rubric must have 26 questions, got " + std::to_string(questions_.size()));
    }
    for (std::size_t i = 0; i < questions_.size(); ++i) {
      const auto& q = questions_[i];
      if (q.id.slot() != i) throw Error(ErrorCode::InvariantViolation, "rubric question out of order: " + q.id.str());
      const auto [main, sub] = question_category(q.id);
      if (q.main_category != main || q.subcategory != sub) {
        throw Error(ErrorCode::InvariantViolation, "category mismatch for " + q.id.str());
      }
    }
  }

  std::span<const RubricQuestion> questions() const { return questions_; }
  const RubricQuestion& at(QuestionId id) const { return questions_[id.slot()]; }

  friend bool operator==(const Rubric&, const Rubric&) = default;

 private:
  std::vector<RubricQuestion> questions_;
};

// ---------------------------------------------------------------------------
// Campaigns
// ---------------------------------------------------------------------------

enum class Platform { Indiegogo = 0, Kickstarter = 1 };
enum class Category { ThreeDPrinter = 0, SmartWatch = 1 };

constexpr std::string_view to_string(Platform p) { return p == Platform::Kickstarter ? "KS" : "IGG"; }
constexpr std::string_view to_string(Category c) { return c == Category::SmartWatch ? "SW" : "3DP"; }

inline std::optional<Platform> parse_platform(std::string_view s) {
  if (s == "KS") return Platform::Kickstarter;
  if (s == "IGG") return Platform::Indiegogo;
  return std::nullopt;
}

inline std::optional<Category> parse_category(std::string_view s) {
  if (s == "SW") return Category::SmartWatch;
  if (s == "3DP") return Category::ThreeDPrinter;
  return std::nullopt;
}

/// Exogenous campaign-page measurements kept in every model.
struct ControlVector {
  long characters = 1;
  long figures = 0;
  long tables = 0;
  long videos = 0;
  long rewards = 0;
  bool team_intro = false;
  bool timeline = false;
  double goal = 1.0;  // platform currency, assumed USD

  void validate() const {
    if (characters < 1) throw Error(ErrorCode::InvalidControl, "characters must be >= 1");
    if (!(goal >= 1.0) || !std::isfinite(goal)) throw Error(ErrorCode::InvalidControl, "goal must be >= 1");
    if (figures < 0 || tables < 0 || videos < 0 || rewards < 0) {
      throw Error(ErrorCode::InvalidControl, "counts must be non-negative");
    }
  }

  friend bool operator==(const ControlVector&, const ControlVector&) = default;
};

using Ratings = std::array<Rating, kQuestionCount>;

struct CampaignRecord {
  std::string id;
  std::string title;
  Platform platform = Platform::Indiegogo;
  Category category = Category::ThreeDPrinter;
  double funding_raised = 0.0;
  ControlVector controls;
  Ratings ratings{};

  Rating rating(QuestionId q) const { return ratings[q.slot()]; }

  void validate() const {
    controls.validate();
    if (!(funding_raised >= 0.0) || !std::isfinite(funding_raised)) {
      throw Error(ErrorCode::InvariantViolation, "funding_raised must be non-negative (campaign " + id + ")");
    }
  }

  friend bool operator==(const CampaignRecord&, const CampaignRecord&) = default;
};

/// Immutable collection of campaigns with unique ids.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<CampaignRecord> records, std::string provenance = {})
      : records_(std::move(records)), provenance_(std::move(provenance)) {
    std::unordered_set<std::string> seen;
    for (const auto& r : records_) {
      r.validate();
      if (!seen.insert(r.id).second) throw Error(ErrorCode::InvariantViolation, "duplicate campaign id: " + r.id);
    }
  }

  std::span<const CampaignRecord> records() const { return records_; }
  const std::string& provenance() const { return provenance_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  template <typename Pred>
  Dataset filter(Pred pred, std::string provenance) const {
    std::vector<CampaignRecord> kept;
    std::copy_if(records_.begin(), records_.end(), std::back_inserter(kept), pred);
    return Dataset(std::move(kept), std::move(provenance));
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<CampaignRecord> records_;
  std::string provenance_;
};

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

/// Ordered term-name -> value map. Order is significant.
using TermValues = std::vector<std::pair<std::string, double>>;

struct DesignRow {
  double response = 0.0;
  TermValues regressors;
};

namespace terms {
inline constexpr std::string_view kCategory = "category_dummy";
inline constexpr std::string_view kPlatform = "platform_dummy";
inline constexpr std::string_view kFigures = "figures";
inline constexpr std::string_view kTables = "tables";
inline constexpr std::string_view kVideos = "videos";
inline constexpr std::string_view kRewards = "rewards";
inline constexpr std::string_view kTeamIntro = "team_intro";
inline constexpr std::string_view kTimeline = "timeline";
inline constexpr std::string_view kLnGoal = "ln_goal";
inline constexpr std::string_view kLnChars = "ln_chars";

inline constexpr std::array<std::string_view, 10> kControlOrder = {
    kCategory, kPlatform, kFigures, kTables, kVideos, kRewards, kTeamIntro, kTimeline, kLnGoal, kLnChars};
}  // namespace terms

inline std::vector<std::string> default_control_terms() {
  return {terms::kControlOrder.begin(), terms::kControlOrder.end()};
}

inline bool is_dummy_term(std::string_view name) { return name == terms::kCategory || name == terms::kPlatform; }
inline bool is_control_term(std::string_view name) {
  return std::find(terms::kControlOrder.begin(), terms::kControlOrder.end(), name) != terms::kControlOrder.end();
}

/// Which control terms and which factors a model uses, and in what order.
/// Regressor order is always control_terms followed by factor_ids.
struct EncodingMeta {
  std::vector<std::string> control_terms = default_control_terms();
  std::vector<QuestionId> factor_ids;

  std::vector<std::string> term_names() const {
    std::vector<std::string> names = control_terms;
    for (auto q : factor_ids) names.push_back(q.str());
    return names;
  }

  friend bool operator==(const EncodingMeta&, const EncodingMeta&) = default;
};

/// ln(max(raised, 1)). The floor maps zero-funding campaigns to 0.
inline double encode_response(double funding_raised) { return std::log(std::max(funding_raised, 1.0)); }
inline double encode_response(const CampaignRecord& record) { return encode_response(record.funding_raised); }

inline TermValues encode_controls(const ControlVector& controls, Platform platform, Category category) {
  controls.validate();
  return {
      {std::string(terms::kCategory), category == Category::SmartWatch ? 1.0 : 0.0},
      {std::string(terms::kPlatform), platform == Platform::Kickstarter ? 1.0 : 0.0},
      {std::string(terms::kFigures), static_cast<double>(controls.figures)},
      {std::string(terms::kTables), static_cast<double>(controls.tables)},
      {std::string(terms::kVideos), static_cast<double>(controls.videos)},
      {std::string(terms::kRewards), static_cast<double>(controls.rewards)},
      {std::string(terms::kTeamIntro), controls.team_intro ? 1.0 : 0.0},
      {std::string(terms::kTimeline), controls.timeline ? 1.0 : 0.0},
      {std::string(terms::kLnGoal), std::log(controls.goal)},
      {std::string(terms::kLnChars), std::log(static_cast<double>(controls.characters))},
  };
}

inline TermValues encode_factors(const Ratings& ratings, std::span<const QuestionId> included) {
  TermValues out;
  out.reserve(included.size());
  for (auto q : included) out.emplace_back(q.str(), score(ratings[q.slot()]));
  return out;
}

inline TermValues encode_factors(const Ratings& ratings, std::span<const std::string> included) {
  std::vector<QuestionId> ids;
  for (const auto& s : included) ids.push_back(parse_question_id(s));
  return encode_factors(ratings, ids);
}

/// Regressors for one campaign laid out per `meta`.
inline TermValues encode_regressors(const Ratings& ratings, const ControlVector& controls, Platform platform,
                                    Category category, const EncodingMeta& meta) {
  const TermValues all_controls = encode_controls(controls, platform, category);
  TermValues out;
  out.reserve(meta.control_terms.size() + meta.factor_ids.size());
  for (const auto& name : meta.control_terms) {
    auto it = std::find_if(all_controls.begin(), all_controls.end(), [&](const auto& kv) { return kv.first == name; });
    if (it == all_controls.end()) throw Error(ErrorCode::TermMismatch, "unknown control term: " + name);
    out.push_back(*it);
  }
  for (auto& kv : encode_factors(ratings, meta.factor_ids)) out.push_back(std::move(kv));
  return out;
}

inline DesignRow design_row(const CampaignRecord& record, const EncodingMeta& meta) {
  return {encode_response(record),
          encode_regressors(record.ratings, record.controls, record.platform, record.category, meta)};
}

inline double funded_percent(double raised, double goal) { return 100.0 * raised / goal; }
inline double funded_percent(const CampaignRecord& record) {
  return funded_percent(record.funding_raised, record.controls.goal);
}

// ---------------------------------------------------------------------------
// Factor prevalence
// ---------------------------------------------------------------------------

inline constexpr double kDefaultPrevalenceThreshold = 0.03;

/// Mean score per question over all records.
inline std::array<double, kQuestionCount> factor_means(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "cannot average ratings of an empty dataset");
  std::array<double, kQuestionCount> sums{};
  for (const auto& r : dataset.records()) {
    for (std::size_t i = 0; i < kQuestionCount; ++i) sums[i] += score(r.ratings[i]);
  }
  for (auto& s : sums) s /= static_cast<double>(dataset.size());
  return sums;
}

struct PrevalenceSplit {
  std::vector<QuestionId> kept;
  std::vector<QuestionId> dropped;
};

/// Drops questions whose unrounded mean score is strictly below `threshold`.
inline PrevalenceSplit factor_prevalence_filter(const Dataset& dataset,
                                                double threshold = kDefaultPrevalenceThreshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvariantViolation, "prevalence threshold must lie in (0,1)");
  }
  const auto means = factor_means(dataset);
  PrevalenceSplit split;
  for (auto q : all_questions()) (means[q.slot()] < threshold ? split.dropped : split.kept).push_back(q);
  return split;
}

}  // namespace rww
