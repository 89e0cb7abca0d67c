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

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "rww/domain.hpp"
#include "rww/error.hpp"
#include "rww/pipeline.hpp"
#include "rww/selection.hpp"
#include "rww/stats.hpp"

namespace rww::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << content;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Delimited dataset files
// ---------------------------------------------------------------------------

namespace csv {

/// Splits RFC 4180-style text into rows of fields. Quoted fields may contain commas,
/// doubled quotes and newlines.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": stray quote");
        quoted = field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        rows.push_back(std::move(row));
        row.clear();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted field");
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace csv

inline std::vector<std::string> dataset_columns() {
  std::vector<std::string> cols = {"id",    "title",      "platform", "category", "funding_raised",
                                   "goal",  "characters", "figures",  "tables",   "videos",
                                   "rewards", "team_intro", "timeline"};
  for (auto q : all_questions()) {
    auto name = q.str();
    name[0] = 'q';
    cols.push_back(name);
  }
  return cols;
}

namespace detail {

inline std::string locus(std::size_t row, std::string_view column) {
  return "row " + std::to_string(row) + ", column " + std::string(column);
}

inline double parse_real(std::string_view s, std::size_t row, std::string_view column) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, locus(row, column) + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline long parse_count(std::string_view s, std::size_t row, std::string_view column) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, locus(row, column) + ": not an integer: '" + std::string(s) + "'");
  }
  if (v < 0) throw Error(ErrorCode::InvariantViolation, locus(row, column) + ": must be non-negative");
  return v;
}

inline bool parse_flag(std::string_view s, std::size_t row, std::string_view column) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw Error(ErrorCode::InvariantViolation, locus(row, column) + ": expected 0 or 1, got '" + std::string(s) + "'");
}

}  // namespace detail

/// Parses a dataset file. Row numbers in diagnostics are 1-based file lines (the header is row 1).
inline Dataset parse_dataset(std::string_view text, std::string provenance = {}) {
  const auto rows = csv::parse(text);
  const auto expected = dataset_columns();
  if (rows.empty()) throw Error(ErrorCode::ParseError, "missing header row");
  if (rows.front() != expected) {
    for (std::size_t j = 0; j < expected.size(); ++j) {
      if (j >= rows.front().size() || rows.front()[j] != expected[j]) {
        throw Error(ErrorCode::ParseError, "header column " + std::to_string(j + 1) + ": expected '" + expected[j] + "'");
      }
    }
    throw Error(ErrorCode::ParseError, "header has unexpected extra columns");
  }

  std::vector<CampaignRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t line = i + 1;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != expected.size()) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(line) + ": expected " +
                                             std::to_string(expected.size()) + " fields, got " +
                                             std::to_string(f.size()));
    }
    CampaignRecord r;
    r.id = f[0];
    if (r.id.empty()) throw Error(ErrorCode::InvariantViolation, detail::locus(line, "id") + ": empty id");
    r.title = f[1];
    const auto platform = parse_platform(f[2]);
    if (!platform) throw Error(ErrorCode::InvariantViolation, detail::locus(line, "platform") + ": expected KS or IGG");
    r.platform = *platform;
    const auto category = parse_category(f[3]);
    if (!category) throw Error(ErrorCode::InvariantViolation, detail::locus(line, "category") + ": expected 3DP or SW");
    r.category = *category;
    r.funding_raised = detail::parse_real(f[4], line, "funding_raised");
    if (!(r.funding_raised >= 0.0)) {
      throw Error(ErrorCode::InvariantViolation, detail::locus(line, "funding_raised") + ": must be non-negative");
    }
    r.controls.goal = detail::parse_real(f[5], line, "goal");
    if (!(r.controls.goal >= 1.0)) throw Error(ErrorCode::InvariantViolation, detail::locus(line, "goal") + ": must be >= 1");
    r.controls.characters = detail::parse_count(f[6], line, "characters");
    if (r.controls.characters < 1) {
      throw Error(ErrorCode::InvariantViolation, detail::locus(line, "characters") + ": must be >= 1");
    }
    r.controls.figures = detail::parse_count(f[7], line, "figures");
    r.controls.tables = detail::parse_count(f[8], line, "tables");
    r.controls.videos = detail::parse_count(f[9], line, "videos");
    r.controls.rewards = detail::parse_count(f[10], line, "rewards");
    r.controls.team_intro = detail::parse_flag(f[11], line, "team_intro");
    r.controls.timeline = detail::parse_flag(f[12], line, "timeline");
    for (int q = 0; q < kQuestionCount; ++q) {
      const auto& column = expected[13 + static_cast<std::size_t>(q)];
      const auto& cell = f[13 + static_cast<std::size_t>(q)];
      if (cell.empty()) throw Error(ErrorCode::InvariantViolation, detail::locus(line, column) + ": missing rating");
      const auto rating = rating_from_score(detail::parse_real(cell, line, column));
      if (!rating) {
        throw Error(ErrorCode::InvariantViolation,
                    detail::locus(line, column) + ": rating '" + cell + "' is not one of 0, 0.5, 1");
      }
      r.ratings[static_cast<std::size_t>(q)] = *rating;
    }
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records), std::move(provenance));
}

inline Dataset load_dataset(const std::string& path) { return parse_dataset(read_file(path), path); }

inline std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  const auto cols = dataset_columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out += (j ? "," : "") + cols[j];
  out += '\n';
  for (const auto& r : dataset.records()) {
    out += csv::quote(r.id) + ',' + csv::quote(r.title) + ',' + std::string(to_string(r.platform)) + ',' +
           std::string(to_string(r.category)) + ',' + format_number(r.funding_raised) + ',' +
           format_number(r.controls.goal) + ',' + std::to_string(r.controls.characters) + ',' +
           std::to_string(r.controls.figures) + ',' + std::to_string(r.controls.tables) + ',' +
           std::to_string(r.controls.videos) + ',' + std::to_string(r.controls.rewards) + ',' +
           (r.controls.team_intro ? "1" : "0") + ',' + (r.controls.timeline ? "1" : "0");
    for (auto rating : r.ratings) out += ',' + format_number(score(rating));
    out += '\n';
  }
  return out;
}

inline void save_dataset(const Dataset& dataset, const std::string& path) {
  write_file(path, serialize_dataset(dataset));
}

// ---------------------------------------------------------------------------
// Structured documents
// ---------------------------------------------------------------------------

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

namespace detail {

template <typename T>
T get(const Json& j, std::string_view key, std::string_view where) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) throw Error(ErrorCode::ParseError, std::string(where) + ": missing field '" + std::string(key) + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::ParseError, std::string(where) + ": field '" + std::string(key) + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> get_optional(const Json& j, std::string_view key, std::string_view where) {
  const auto it = j.find(std::string(key));
  if (it == j.end() || it->is_null()) return std::nullopt;
  return get<T>(j, key, where);
}

inline void check_schema(const Json& j, std::string_view what) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string(what) + ": expected an object");
  const int version = get<int>(j, "schema_version", what);
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::SchemaVersionError,
                std::string(what) + ": unsupported schema_version " + std::to_string(version));
  }
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, std::string_view what) {
  for (auto v : values) {
    if (to_string(v) == text) return v;
  }
  throw Error(ErrorCode::ParseError, std::string(what) + ": unknown value '" + std::string(text) + "'");
}

inline void put_optional(Json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

}  // namespace detail

// Model documents ------------------------------------------------------------

struct ModelDocument {
  std::string created_at;
  std::string provenance;
  stats::FittedModel model;

  friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

inline Json to_json(const ModelDocument& doc) {
  const auto& m = doc.model;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = m.name;
  j["created_at"] = doc.created_at;
  j["provenance"] = doc.provenance;
  j["has_intercept"] = m.has_intercept;
  Json intercept;
  intercept["coefficient"] = m.intercept;
  detail::put_optional(intercept, "std_error", m.intercept_std_error);
  detail::put_optional(intercept, "p_value", m.intercept_p_value);
  j["intercept"] = intercept;
  Json terms = Json::array();
  for (const auto& t : m.terms) {
    Json tj;
    tj["name"] = t.name;
    tj["role"] = std::string(to_string(t.role));
    tj["coefficient"] = t.coefficient;
    detail::put_optional(tj, "std_error", t.std_error);
    detail::put_optional(tj, "p_value", t.p_value);
    terms.push_back(tj);
  }
  j["terms"] = terms;
  Json stats;
  stats["r2"] = m.r2;
  stats["adj_r2"] = m.adj_r2;
  stats["n"] = m.n;
  stats["p"] = m.p;
  detail::put_optional(stats, "residual_sigma", m.residual_sigma);
  j["stats"] = stats;
  Json meta;
  meta["control_terms"] = m.encoding_meta.control_terms;
  Json factors = Json::array();
  for (auto q : m.encoding_meta.factor_ids) factors.push_back(q.str());
  meta["factor_ids"] = factors;
  j["encoding_meta"] = meta;
  if (!m.unscaled_covariance.empty()) j["unscaled_covariance"] = m.unscaled_covariance;
  return j;
}

inline ModelDocument model_from_json(const Json& j) {
  constexpr std::string_view where = "model document";
  detail::check_schema(j, where);
  ModelDocument doc;
  auto& m = doc.model;
  m.name = detail::get<std::string>(j, "name", where);
  doc.created_at = detail::get_optional<std::string>(j, "created_at", where).value_or("");
  doc.provenance = detail::get_optional<std::string>(j, "provenance", where).value_or("");
  m.has_intercept = detail::get_optional<bool>(j, "has_intercept", where).value_or(true);
  const auto intercept = detail::get<Json>(j, "intercept", where);
  m.intercept = detail::get<double>(intercept, "coefficient", "intercept");
  m.intercept_std_error = detail::get_optional<double>(intercept, "std_error", "intercept");
  m.intercept_p_value = detail::get_optional<double>(intercept, "p_value", "intercept");
  for (const auto& tj : detail::get<Json>(j, "terms", where)) {
    stats::TermEstimate t;
    t.name = detail::get<std::string>(tj, "name", "term");
    t.role = detail::parse_enum(detail::get<std::string>(tj, "role", "term"),
                                std::array{stats::TermRole::Control, stats::TermRole::Factor, stats::TermRole::Dummy},
                                "term role");
    t.coefficient = detail::get<double>(tj, "coefficient", "term");
    t.std_error = detail::get_optional<double>(tj, "std_error", "term");
    t.p_value = detail::get_optional<double>(tj, "p_value", "term");
    if (t.p_value && !(*t.p_value >= 0.0 && *t.p_value <= 1.0)) {
      throw Error(ErrorCode::InvariantViolation, "term " + t.name + ": p_value outside [0,1]");
    }
    m.terms.push_back(std::move(t));
  }
  const auto stats = detail::get<Json>(j, "stats", where);
  m.r2 = detail::get<double>(stats, "r2", "stats");
  m.adj_r2 = detail::get<double>(stats, "adj_r2", "stats");
  m.n = detail::get<std::size_t>(stats, "n", "stats");
  m.p = detail::get<std::size_t>(stats, "p", "stats");
  m.residual_sigma = detail::get_optional<double>(stats, "residual_sigma", "stats");
  const auto meta = detail::get<Json>(j, "encoding_meta", where);
  m.encoding_meta.control_terms = detail::get<std::vector<std::string>>(meta, "control_terms", "encoding_meta");
  m.encoding_meta.factor_ids.clear();
  for (const auto& s : detail::get<std::vector<std::string>>(meta, "factor_ids", "encoding_meta")) {
    m.encoding_meta.factor_ids.push_back(parse_question_id(s));
  }
  m.unscaled_covariance = detail::get_optional<std::vector<double>>(j, "unscaled_covariance", where).value_or(
      std::vector<double>{});

  if (m.encoding_meta.term_names() != m.term_names()) {
    throw Error(ErrorCode::InvariantViolation, "encoding_meta does not match the term list of " + m.name);
  }
  if (m.p != m.terms.size()) throw Error(ErrorCode::InvariantViolation, "stats.p does not match the term count");
  const auto width = m.design_width();
  if (!m.unscaled_covariance.empty() && m.unscaled_covariance.size() != width * width) {
    throw Error(ErrorCode::InvariantViolation, "unscaled_covariance has the wrong size");
  }
  return doc;
}

inline std::string serialize_model(const ModelDocument& doc) { return to_json(doc).dump(2) + "\n"; }
inline ModelDocument parse_model(std::string_view text) { return model_from_json(parse_json(text)); }
inline void save_model(const ModelDocument& doc, const std::string& path) { write_file(path, serialize_model(doc)); }
inline ModelDocument load_model(const std::string& path) { return parse_model(read_file(path)); }

// Rubric ---------------------------------------------------------------------

inline Json to_json(const Rubric& rubric) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json qs = Json::array();
  for (const auto& q : rubric.questions()) {
    Json qj;
    qj["id"] = q.id.str();
    qj["main_category"] = std::string(to_string(q.main_category));
    qj["subcategory"] = std::string(to_string(q.subcategory));
    qj["question"] = q.question;
    qj["criteria"] = {{"full", q.criteria_full}, {"partial", q.criteria_partial}, {"none", q.criteria_none}};
    qs.push_back(qj);
  }
  j["questions"] = qs;
  return j;
}

inline Rubric rubric_from_json(const Json& j) {
  detail::check_schema(j, "rubric");
  std::vector<RubricQuestion> questions;
  for (const auto& qj : detail::get<Json>(j, "questions", "rubric")) {
    RubricQuestion q;
    q.id = parse_question_id(detail::get<std::string>(qj, "id", "question"));
    const std::string where = "question " + q.id.str();
    q.main_category = detail::parse_enum(detail::get<std::string>(qj, "main_category", where),
                                         std::array{MainCategory::Real, MainCategory::Win, MainCategory::Worth}, where);
    q.subcategory = detail::parse_enum(
        detail::get<std::string>(qj, "subcategory", where),
        std::array{Subcategory::MarketAttractiveness, Subcategory::ProductFeasibility, Subcategory::ProductAdvantage,
                   Subcategory::TeamCompetency, Subcategory::ExpectedReturn, Subcategory::StrategicFit},
        where);
    q.question = detail::get<std::string>(qj, "question", where);
    const auto criteria = detail::get<Json>(qj, "criteria", where);
    q.criteria_full = detail::get<std::string>(criteria, "full", where);
    q.criteria_partial = detail::get<std::string>(criteria, "partial", where);
    q.criteria_none = detail::get<std::string>(criteria, "none", where);
    questions.push_back(std::move(q));
  }
  return Rubric(std::move(questions));
}

inline Rubric load_rubric(const std::string& path) { return rubric_from_json(parse_json(read_file(path))); }

// Synthetic-data specs and reports ------------------------------------------

inline Json to_json(const pipeline::MeanSe& ms) { return Json{{"mean", ms.mean}, {"se", ms.se}}; }

inline pipeline::MeanSe mean_se_from_json(const Json& j, std::string_view where) {
  return {detail::get<double>(j, "mean", where), detail::get<double>(j, "se", where)};
}

inline Json to_json(const pipeline::SynthSpec& spec) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = spec.n;
  Json means;
  for (auto q : all_questions()) means[q.str()] = spec.factor_means[q.slot()];
  j["factor_means"] = means;
  Json cells = Json::array();
  for (const auto& c : spec.cells) {
    Json cj;
    cj["platform"] = std::string(to_string(c.platform));
    cj["category"] = std::string(to_string(c.category));
    cj["weight"] = c.weight;
    cj["goal"] = to_json(c.goal);
    cj["characters"] = to_json(c.characters);
    cj["figures"] = to_json(c.figures);
    cj["tables"] = to_json(c.tables);
    cj["videos"] = to_json(c.videos);
    cj["rewards"] = to_json(c.rewards);
    cj["team_intro_rate"] = c.team_intro_rate;
    cj["timeline_rate"] = c.timeline_rate;
    cells.push_back(cj);
  }
  j["control_distributions"] = cells;
  j["intercept"] = spec.intercept;
  Json planted = Json::array();
  for (const auto& [name, coef] : spec.planted) planted.push_back({{"term", name}, {"coefficient", coef}});
  j["planted"] = planted;
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  return j;
}

/// Missing optional sections fall back to the reference calibration.
inline pipeline::SynthSpec synth_spec_from_json(const Json& j) {
  constexpr std::string_view where = "synth spec";
  detail::check_schema(j, where);
  pipeline::SynthSpec s;
  s.n = detail::get<std::size_t>(j, "n", where);
  if (auto means = detail::get_optional<Json>(j, "factor_means", where)) {
    for (const auto& [key, value] : means->items()) {
      if (!value.is_number()) throw Error(ErrorCode::ParseError, "factor_means." + key + " must be a number");
      s.factor_means[parse_question_id(key).slot()] = value.get<double>();
    }
  }
  if (auto cells = detail::get_optional<Json>(j, "control_distributions", where)) {
    s.cells.clear();
    for (const auto& cj : *cells) {
      pipeline::CellCalibration c;
      const auto platform = parse_platform(detail::get<std::string>(cj, "platform", "cell"));
      const auto category = parse_category(detail::get<std::string>(cj, "category", "cell"));
      if (!platform || !category) throw Error(ErrorCode::ParseError, "cell: bad platform or category");
      c.platform = *platform;
      c.category = *category;
      c.weight = detail::get<std::size_t>(cj, "weight", "cell");
      c.goal = mean_se_from_json(detail::get<Json>(cj, "goal", "cell"), "goal");
      c.characters = mean_se_from_json(detail::get<Json>(cj, "characters", "cell"), "characters");
      c.figures = mean_se_from_json(detail::get<Json>(cj, "figures", "cell"), "figures");
      c.tables = mean_se_from_json(detail::get<Json>(cj, "tables", "cell"), "tables");
      c.videos = mean_se_from_json(detail::get<Json>(cj, "videos", "cell"), "videos");
      c.rewards = mean_se_from_json(detail::get<Json>(cj, "rewards", "cell"), "rewards");
      c.team_intro_rate = detail::get<double>(cj, "team_intro_rate", "cell");
      c.timeline_rate = detail::get<double>(cj, "timeline_rate", "cell");
      s.cells.push_back(c);
    }
  }
  s.intercept = detail::get_optional<double>(j, "intercept", where).value_or(0.0);
  if (auto planted = detail::get_optional<Json>(j, "planted", where)) {
    for (const auto& pj : *planted) {
      s.planted.emplace_back(detail::get<std::string>(pj, "term", "planted"),
                             detail::get<double>(pj, "coefficient", "planted"));
    }
  }
  s.noise_sigma = detail::get_optional<double>(j, "noise_sigma", where).value_or(0.0);
  s.seed = detail::get_optional<std::uint64_t>(j, "seed", where).value_or(0);
  s.validate();
  return s;
}

inline Json to_json(const pipeline::RecoveryReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["trials"] = r.trials;
  Json planted = Json::array();
  for (auto q : r.planted) planted.push_back(q.str());
  j["planted"] = planted;
  j["recall"] = r.recall;
  j["exact_match"] = r.exact_match;
  Json rates;
  for (auto q : all_questions()) rates[q.str()] = r.selection_rate[q.slot()];
  j["selection_rate"] = rates;
  return j;
}

inline Json to_json(const selection::SelectionResult& r) {
  Json j;
  Json selected = Json::array();
  for (auto q : r.selected) selected.push_back(q.str());
  j["selected"] = selected;
  j["score"] = r.score;
  j["fold_scores"] = r.fold_scores;
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"step", t.step},
                     {"action", t.action == selection::Action::Add ? "add" : "remove"},
                     {"term", t.term.str()},
                     {"score_before", t.score_before},
                     {"score_after", t.score_after}});
  }
  j["trace"] = trace;
  return j;
}

inline Json to_json(const stats::TTestResult& t) {
  return {{"t", t.t_stat}, {"df", t.degrees_of_freedom}, {"p_value", t.p_value}};
}

inline Json to_json(const pipeline::ScreeningReport& r) {
  Json j;
  j["alpha"] = r.alpha;
  Json rows = Json::array();
  for (const auto& f : r.factors) {
    Json fj;
    fj["id"] = f.id.str();
    fj["mean"] = {{"IGG", f.mean_indiegogo}, {"KS", f.mean_kickstarter}, {"3DP", f.mean_printer}, {"SW", f.mean_watch}};
    Json platform = to_json(f.by_platform);
    platform["significant"] = f.platform_significant;
    Json category = to_json(f.by_category);
    category["significant"] = f.category_significant;
    fj["platform_test"] = platform;
    fj["category_test"] = category;
    rows.push_back(fj);
  }
  j["factors"] = rows;
  Json pool = Json::array();
  for (auto q : r.candidate_pool) pool.push_back(q.str());
  j["candidate_pool"] = pool;
  return j;
}

// Prediction requests --------------------------------------------------------

struct PredictRequest {
  std::string model_id;
  Platform platform = Platform::Indiegogo;
  Category category = Category::ThreeDPrinter;
  ControlVector controls;
  Ratings ratings{};  // questions absent from the request are None
  std::optional<double> interval_level;
};

inline Rating rating_from_json(const Json& v, std::string_view key) {
  std::optional<Rating> r;
  if (v.is_number()) {
    r = rating_from_score(v.get<double>());
  } else if (v.is_string()) {
    r = parse_rating(v.get<std::string>());
  } else {
    throw Error(ErrorCode::ParseError, "ratings." + std::string(key) + " must be a number or a string");
  }
  if (!r) throw Error(ErrorCode::InvariantViolation, "ratings." + std::string(key) + " is not one of 0, 0.5, 1");
  return *r;
}

inline PredictRequest predict_request_from_json(const Json& j) {
  constexpr std::string_view where = "request";
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "request body must be an object");
  PredictRequest req;
  req.model_id = detail::get_optional<std::string>(j, "model_id", where).value_or("");
  const auto platform = parse_platform(detail::get<std::string>(j, "platform", where));
  if (!platform) throw Error(ErrorCode::InvariantViolation, "platform must be KS or IGG");
  req.platform = *platform;
  const auto category = parse_category(detail::get<std::string>(j, "category", where));
  if (!category) throw Error(ErrorCode::InvariantViolation, "category must be 3DP or SW");
  req.category = *category;

  const auto c = detail::get<Json>(j, "controls", where);
  if (!c.is_object()) throw Error(ErrorCode::ParseError, "controls must be an object");
  req.controls.characters = detail::get<long>(c, "characters", "controls");
  req.controls.figures = detail::get_optional<long>(c, "figures", "controls").value_or(0);
  req.controls.tables = detail::get_optional<long>(c, "tables", "controls").value_or(0);
  req.controls.videos = detail::get_optional<long>(c, "videos", "controls").value_or(0);
  req.controls.rewards = detail::get_optional<long>(c, "rewards", "controls").value_or(0);
  req.controls.team_intro = detail::get_optional<bool>(c, "team_intro", "controls").value_or(false);
  req.controls.timeline = detail::get_optional<bool>(c, "timeline", "controls").value_or(false);
  req.controls.goal = detail::get<double>(c, "goal", "controls");
  try {
    req.controls.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvariantViolation, e.what());
  }

  req.ratings.fill(Rating::None);
  if (auto ratings = detail::get_optional<Json>(j, "ratings", where)) {
    if (!ratings->is_object()) throw Error(ErrorCode::ParseError, "ratings must be an object");
    for (const auto& [key, value] : ratings->items()) {
      QuestionId q;
      try {
        q = parse_question_id(key);
      } catch (const Error&) {
        throw Error(ErrorCode::InvariantViolation, "unknown question id in ratings: " + key);
      }
      req.ratings[q.slot()] = rating_from_json(value, key);
    }
  }
  req.interval_level = detail::get_optional<double>(j, "interval_level", where);
  if (req.interval_level && !(*req.interval_level > 0.0 && *req.interval_level < 1.0)) {
    throw Error(ErrorCode::InvariantViolation, "interval_level must lie in (0,1)");
  }
  return req;
}

inline Json to_json(const PredictRequest& req) {
  Json j;
  if (!req.model_id.empty()) j["model_id"] = req.model_id;
  j["platform"] = std::string(to_string(req.platform));
  j["category"] = std::string(to_string(req.category));
  j["controls"] = {{"characters", req.controls.characters}, {"figures", req.controls.figures},
                   {"tables", req.controls.tables},         {"videos", req.controls.videos},
                   {"rewards", req.controls.rewards},       {"team_intro", req.controls.team_intro},
                   {"timeline", req.controls.timeline},     {"goal", req.controls.goal}};
  Json ratings;
  for (auto q : all_questions()) ratings[q.str()] = score(req.ratings[q.slot()]);
  j["ratings"] = ratings;
  if (req.interval_level) j["interval_level"] = *req.interval_level;
  return j;
}

inline Json to_json(const stats::PredictionResult& r, const std::string& model_id) {
  Json j;
  j["model_id"] = model_id;
  j["ln_amount"] = r.ln_amount;
  j["amount"] = r.amount;
  if (r.interval) {
    j["interval"] = {{"level", r.interval->level}, {"lower", r.interval->lower}, {"upper", r.interval->upper}};
  } else {
    j["interval"] = nullptr;
  }
  Json contributions = Json::array();
  for (const auto& [term, c] : r.contributions) contributions.push_back({{"term", term}, {"contribution", c}});
  j["per_term_contributions"] = contributions;
  return j;
}

}  // namespace rww::io
