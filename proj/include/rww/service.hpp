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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rww/domain.hpp"
#include "rww/error.hpp"
#include "rww/io.hpp"
#include "rww/bundled_model.hpp"
#include "rww/stats.hpp"

namespace rww::service {

/// Prediction for a request under `model`. Shared by the CLI and the HTTP service.
inline stats::PredictionResult predict_request(const stats::FittedModel& model, const io::PredictRequest& req) {
  const auto regressors =
      encode_regressors(req.ratings, req.controls, req.platform, req.category, model.encoding_meta);
  return stats::predict(model, regressors, req.interval_level);
}

struct WhatIfStep {
  QuestionId factor;
  Rating from = Rating::None;
  std::optional<Rating> to;  // nullopt when the factor is already Full
  double delta = 0.0;        // change in ln_amount from the one-step raise
  double ln_amount = 0.0;    // prediction after the raise
};

/// One-step raise of every factor the model rates, sorted by delta (descending), then question index.
inline std::vector<WhatIfStep> whatif(const stats::FittedModel& model, const io::PredictRequest& base) {
  const double base_ln = predict_request(model, base).ln_amount;
  std::vector<WhatIfStep> steps;
  for (const auto& term : model.terms) {
    if (term.role != stats::TermRole::Factor) continue;
    const auto q = parse_question_id(term.name);
    WhatIfStep s;
    s.factor = q;
    s.from = base.ratings[q.slot()];
    s.to = next_rating(s.from);
    s.ln_amount = base_ln;
    if (s.to) {
      s.delta = term.coefficient * (score(*s.to) - score(s.from));
      auto raised = base;
      raised.ratings[q.slot()] = *s.to;
      s.ln_amount = predict_request(model, raised).ln_amount;
    }
    steps.push_back(s);
  }
  std::stable_sort(steps.begin(), steps.end(), [](const WhatIfStep& a, const WhatIfStep& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return a.factor < b.factor;
  });
  return steps;
}

inline io::Json to_json(const std::vector<WhatIfStep>& steps, double base_ln, const std::string& model_id) {
  io::Json j;
  j["model_id"] = model_id;
  j["base_ln_amount"] = base_ln;
  io::Json list = io::Json::array();
  for (const auto& s : steps) {
    io::Json sj;
    sj["factor"] = s.factor.str();
    sj["from"] = score(s.from);
    sj["to"] = s.to ? io::Json(score(*s.to)) : io::Json(nullptr);
    sj["delta"] = s.delta;
    sj["ln_amount"] = s.ln_amount;
    list.push_back(sj);
  }
  j["steps"] = list;
  return j;
}

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Read-only registry of models plus the rubric, answering the HTTP routes.
/// Immutable after construction, so concurrent handle() calls need no locking.
class Service {
 public:
  Service(std::optional<Rubric> rubric, std::vector<io::ModelDocument> models) : rubric_(std::move(rubric)) {
    io::ModelDocument bundled{"", "bundled reference baseline", bundled_baseline_model()};
    models_.emplace(bundled.model.name, std::move(bundled));
    for (auto& doc : models) {
      const auto id = doc.model.name;
      models_.insert_or_assign(id, std::move(doc));
    }
  }

  const stats::FittedModel& model(std::string_view id) const {
    const auto it = models_.find(std::string(id));
    if (it == models_.end()) throw Error(ErrorCode::UnknownModel, "no model with id '" + std::string(id) + "'");
    return it->second.model;
  }

  Response handle(std::string_view method, std::string_view path, std::string_view body) const {
    try {
      return route(method, path, body);
    } catch (const Error& e) {
      return error_response(status_for(e.code()), e.what());
    } catch (const std::exception& e) {
      return error_response(500, e.what());
    }
  }

  static int status_for(ErrorCode code) {
    switch (code) {
      case ErrorCode::ParseError:
      case ErrorCode::SchemaVersionError:
        return 400;
      case ErrorCode::UnknownModel:
        return 404;
      case ErrorCode::InvariantViolation:
      case ErrorCode::InvalidControl:
      case ErrorCode::UnknownQuestionId:
      case ErrorCode::TermMismatch:
        return 422;
      default:
        return 500;
    }
  }

 private:
  static Response error_response(int status, std::string_view message) {
    io::Json j{{"error", message}, {"status", status}};
    return {status, j.dump()};
  }

  static std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
    std::size_t start = 0;
    while (start <= path.size()) {
      const auto end = path.find('/', start);
      const auto part = path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      if (!part.empty()) parts.push_back(part);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    return parts;
  }

  Response route(std::string_view method, std::string_view path, std::string_view body) const {
    const auto parts = split_path(path);
    if (method == "GET" && parts.size() == 1 && parts[0] == "rubric") {
      if (!rubric_) return error_response(404, "no rubric loaded");
      return {200, io::to_json(*rubric_).dump()};
    }
    if (parts.empty() || parts[0] != "models") return error_response(404, "no route for " + std::string(path));

    if (method == "GET" && parts.size() == 1) {
      io::Json list = io::Json::array();
      for (const auto& [id, doc] : models_) {
        list.push_back({{"id", id},
                        {"terms", doc.model.terms.size()},
                        {"intervals", !doc.model.unscaled_covariance.empty() && doc.model.residual_sigma.has_value()}});
      }
      return {200, io::Json{{"models", list}}.dump()};
    }
    if (parts.size() < 2) return error_response(404, "no route for " + std::string(path));
    const std::string id(parts[1]);
    const auto& m = model(id);

    if (method == "GET" && parts.size() == 2) return {200, io::to_json(models_.at(id)).dump()};
    if (method == "POST" && parts.size() == 3 && parts[2] == "predict") {
      const auto req = io::predict_request_from_json(io::parse_json(body));
      return {200, io::to_json(predict_request(m, req), id).dump()};
    }
    if (method == "POST" && parts.size() == 3 && parts[2] == "whatif") {
      const auto req = io::predict_request_from_json(io::parse_json(body));
      const double base_ln = predict_request(m, req).ln_amount;
      return {200, to_json(whatif(m, req), base_ln, id).dump()};
    }
    return error_response(method == "GET" || method == "POST" ? 404 : 405, "no route for " + std::string(path));
  }

  std::optional<Rubric> rubric_;
  std::map<std::string, io::ModelDocument> models_;
};

}  // namespace rww::service
