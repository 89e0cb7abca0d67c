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

#include <string>

#include "rww/domain.hpp"
#include "rww/stats.hpp"

namespace rww {

inline constexpr std::string_view kBundledBaselineId = "paper-baseline";

/// Reference baseline over all 127 campaigns (3D printers and smart watches on Kickstarter and
/// Indiegogo). Carries coefficients and p-values only; without standard errors or a residual
/// scale it yields point predictions.
///
/// Two entries are bounds rather than values: the figures coefficient "<0.1" is stored as 0 and
/// the platform p-value "<.01" as 0.01.
inline stats::FittedModel bundled_baseline_model() {
  using stats::TermRole;
  stats::FittedModel m;
  m.name = std::string(kBundledBaselineId);
  m.has_intercept = true;
  m.intercept = 1.97;
  m.intercept_p_value = 0.49;
  m.terms = {
      {"category_dummy", TermRole::Dummy, 0.62, std::nullopt, 0.01},
      {"platform_dummy", TermRole::Dummy, -1.01, std::nullopt, 0.01},
      {"figures", TermRole::Control, 0.0, std::nullopt, 0.99},
      {"tables", TermRole::Control, 0.06, std::nullopt, 0.63},
      {"videos", TermRole::Control, -0.15, std::nullopt, 0.15},
      {"rewards", TermRole::Control, 0.05, std::nullopt, 0.12},
      {"team_intro", TermRole::Control, 0.17, std::nullopt, 0.68},
      {"timeline", TermRole::Control, 0.22, std::nullopt, 0.63},
      {"ln_goal", TermRole::Control, 0.14, std::nullopt, 0.40},
      {"ln_chars", TermRole::Control, 0.33, std::nullopt, 0.25},
      {"Q01", TermRole::Factor, 2.09, std::nullopt, 0.01},
      {"Q08", TermRole::Factor, 1.29, std::nullopt, 0.01},
      {"Q12", TermRole::Factor, 1.91, std::nullopt, 0.01},
      {"Q16", TermRole::Factor, 1.67, std::nullopt, 0.04},
      {"Q25", TermRole::Factor, 1.31, std::nullopt, 0.04},
  };
  m.n = 127;
  m.p = 15;
  m.r2 = 0.635;
  m.adj_r2 = 0.580;
  m.encoding_meta.control_terms = default_control_terms();
  m.encoding_meta.factor_ids = {QuestionId(1), QuestionId(8), QuestionId(12), QuestionId(16), QuestionId(25)};
  return m;
}

}  // namespace rww
