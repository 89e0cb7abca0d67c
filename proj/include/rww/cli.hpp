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

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rww/domain.hpp"
#include "rww/error.hpp"
#include "rww/io.hpp"
#include "rww/bundled_model.hpp"
#include "rww/pipeline.hpp"
#include "rww/service.hpp"
#include "rww/stats.hpp"
// Last: httplib pulls in <resolv.h>, whose _res macro breaks Eigen headers parsed after it.
#include "rww/http.hpp"

#ifndef RWW_DATA_DIR
#define RWW_DATA_DIR "data"
#endif

namespace rww::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

inline std::string default_rubric_path() { return std::string(RWW_DATA_DIR) + "/rubric.json"; }

/// "paper-baseline" names the bundled model; anything else is a model document path.
inline io::ModelDocument resolve_model(const std::string& ref) {
  if (ref == kBundledBaselineId) return {"", "bundled reference baseline", bundled_baseline_model()};
  return io::load_model(ref);
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Whitespace/comma separated ratings (0 | 0.5 | 1 or None/Partial/Full); brackets are ignored.
inline std::vector<Rating> parse_rating_list(const std::string& text) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',' || c == '[' || c == ']' || c == '"') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<Rating> out;
  std::string token;
  while (in >> token) {
    const auto r = parse_rating(token);
    if (!r) throw Error(ErrorCode::InvariantViolation, "rating '" + token + "' is not one of 0, 0.5, 1");
    out.push_back(*r);
  }
  return out;
}

namespace detail {

inline std::optional<pipeline::SliceBy> parse_mode(const std::string& mode) {
  if (mode == "baseline") return std::nullopt;
  const auto eq = mode.find('=');
  if (eq != std::string::npos) {
    const auto key = mode.substr(0, eq);
    const auto value = mode.substr(eq + 1);
    pipeline::SliceBy slice;
    if (key == "platform") {
      if (auto p = parse_platform(value)) {
        slice.kind = pipeline::SliceKind::Platform;
        slice.platform = *p;
        return slice;
      }
    } else if (key == "category") {
      if (auto c = parse_category(value)) {
        slice.kind = pipeline::SliceKind::Category;
        slice.category = *c;
        return slice;
      }
    }
  }
  throw CLI::ValidationError("--mode", "expected baseline, platform=<KS|IGG> or category=<3DP|SW>");
}

inline void print_model_table(std::ostream& out, const stats::FittedModel& m) {
  auto opt = [](const std::optional<double>& v) {
    std::ostringstream s;
    if (v) {
      s << std::setprecision(4) << *v;
    } else {
      s << "-";
    }
    return s.str();
  };
  out << std::left << std::setw(18) << "term" << std::right << std::setw(12) << "coef" << std::setw(12) << "std_err"
      << std::setw(10) << "p" << '\n';
  out << std::left << std::setw(18) << "(intercept)" << std::right << std::setw(12) << std::setprecision(4)
      << m.intercept << std::setw(12) << opt(m.intercept_std_error) << std::setw(10) << opt(m.intercept_p_value)
      << '\n';
  for (const auto& t : m.terms) {
    out << std::left << std::setw(18) << t.name << std::right << std::setw(12) << std::setprecision(4)
        << t.coefficient << std::setw(12) << opt(t.std_error) << std::setw(10) << opt(t.p_value) << '\n';
  }
  out << "n=" << m.n << " p=" << m.p << " R2=" << std::setprecision(4) << m.r2 << " adjR2=" << m.adj_r2;
  if (m.residual_sigma) out << " sigma=" << *m.residual_sigma;
  out << '\n';
}

}  // namespace detail

/// Runs the command line. Diagnostics go to `err` only; exit codes: 0 ok, 1 usage,
/// 2 data error, 3 numerical error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Real-Win-Worth crowdfunding prediction toolkit", "rww"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));

  // train
  auto* train = app.add_subcommand("train", "Select factors and fit a prediction model");
  std::string train_data, train_mode = "baseline", train_out, train_baseline = std::string(kBundledBaselineId), train_name;
  pipeline::BuildSpec build;
  train->add_option("--data", train_data, "Dataset file")->required();
  train->add_option("--mode", train_mode, "baseline | platform=<KS|IGG> | category=<3DP|SW>");
  train->add_option("--k", build.k_folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  train->add_option("--seed", build.seed, "Fold-assignment seed");
  train->add_option("--alpha", build.alpha, "Screening significance level")->check(CLI::Range(0.0, 1.0));
  train->add_option("--threshold", build.prevalence_threshold, "Prevalence threshold");
  train->add_option("--tolerance", build.tolerance, "Minimum score improvement per step");
  train->add_option("--baseline", train_baseline, "Model whose factors are forced in specific modes");
  train->add_option("--name", train_name, "Model name");
  train->add_option("--out", train_out, "Write the model document here");

  // predict
  auto* predict = app.add_subcommand("predict", "Predict ln(funding raised) for one campaign");
  std::string predict_model = std::string(kBundledBaselineId), predict_campaign;
  std::optional<double> predict_interval;
  predict->add_option("--model", predict_model, "Model id (paper-baseline) or model document path");
  predict->add_option("--campaign", predict_campaign, "Campaign request document")->required();
  predict->add_option("--interval", predict_interval, "Prediction interval level, e.g. 0.9");

  // screen
  auto* screen = app.add_subcommand("screen", "Platform/category t-tests on factor ratings");
  std::string screen_data;
  double screen_alpha = 0.05, screen_threshold = kDefaultPrevalenceThreshold;
  screen->add_option("--data", screen_data, "Dataset file")->required();
  screen->add_option("--alpha", screen_alpha, "Significance level");
  screen->add_option("--threshold", screen_threshold, "Prevalence threshold applied first");

  // kappa
  auto* kappa = app.add_subcommand("kappa", "Inter-rater agreement");
  std::string kappa_a, kappa_b, kappa_weights = "linear";
  kappa->add_option("--a", kappa_a, "Ratings of rater A")->required();
  kappa->add_option("--b", kappa_b, "Ratings of rater B")->required();
  kappa->add_option("--weights", kappa_weights, "linear | none")->check(CLI::IsMember({"linear", "none"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Planted-model recovery experiment");
  std::string simulate_spec, simulate_emit;
  std::size_t simulate_trials = 100;
  simulate->add_option("--spec", simulate_spec, "Synthetic-data spec (default: bundled baseline, sigma 0.3)");
  simulate->add_option("--trials", simulate_trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--emit-dataset", simulate_emit, "Write one generated dataset instead of running trials");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP prediction service");
  int serve_port = 8080;
  std::string serve_host = "127.0.0.1", serve_models_dir, serve_rubric = default_rubric_path();
  serve->add_option("--port", serve_port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--models-dir", serve_models_dir, "Directory of additional model documents");
  serve->add_option("--rubric", serve_rubric, "Rubric document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const bool table = format == "table";
  try {
    if (*train) {
      const auto slice = detail::parse_mode(train_mode);
      const auto dataset = io::load_dataset(train_data);
      build.model_name = train_name.empty() ? train_mode : train_name;
      pipeline::BuildResult result;
      if (slice) {
        const auto criticals = resolve_model(train_baseline).model.encoding_meta.factor_ids;
        result = pipeline::build_specific(pipeline::slice_dataset(dataset, *slice), *slice, criticals, build);
      } else {
        result = pipeline::build_baseline(dataset, build);
      }
      io::ModelDocument doc{utc_timestamp(), "trained on " + train_data + " (" + train_mode + ")",
                            result.selection.final_model};
      if (!train_out.empty()) io::save_model(doc, train_out);
      if (table) {
        out << "selected:";
        for (auto q : result.selection.selected) out << ' ' << q.str();
        out << "\ncv score: " << result.selection.score << '\n';
        detail::print_model_table(out, doc.model);
      } else {
        io::Json j;
        j["selection"] = io::to_json(result.selection);
        io::Json dropped = io::Json::array();
        for (auto q : result.prevalence.dropped) dropped.push_back(q.str());
        j["prevalence_dropped"] = dropped;
        if (result.screening) j["screening"] = io::to_json(*result.screening);
        j["model"] = io::to_json(doc);
        out << j.dump(2) << '\n';
      }
      return kOk;
    }

    if (*predict) {
      const auto doc = resolve_model(predict_model);
      auto req = io::predict_request_from_json(io::parse_json(io::read_file(predict_campaign)));
      if (predict_interval) req.interval_level = predict_interval;
      const auto result = service::predict_request(doc.model, req);
      if (table) {
        out << std::setprecision(6) << "ln_amount " << result.ln_amount << "\namount " << result.amount << '\n';
        if (result.interval) {
          out << "interval " << result.interval->level << " [" << result.interval->lower << ", "
              << result.interval->upper << "]\n";
        }
      } else {
        out << io::to_json(result, doc.model.name).dump(2) << '\n';
      }
      return kOk;
    }

    if (*screen) {
      const auto dataset = io::load_dataset(screen_data);
      const auto split = factor_prevalence_filter(dataset, screen_threshold);
      const auto report = pipeline::screen_factors(dataset, split.kept, screen_alpha);
      if (table) {
        out << std::left << std::setw(6) << "id" << std::right << std::setw(8) << "IGG" << std::setw(8) << "KS"
            << std::setw(10) << "t_plat" << std::setw(10) << "p_plat" << std::setw(8) << "3DP" << std::setw(8) << "SW"
            << std::setw(10) << "t_cat" << std::setw(10) << "p_cat" << "  pool\n";
        for (const auto& f : report.factors) {
          const bool pooled = !f.platform_significant && !f.category_significant;
          out << std::left << std::setw(6) << f.id.str() << std::right << std::fixed << std::setprecision(3)
              << std::setw(8) << f.mean_indiegogo << std::setw(8) << f.mean_kickstarter << std::setw(10)
              << f.by_platform.t_stat << std::setw(10) << f.by_platform.p_value << std::setw(8) << f.mean_printer
              << std::setw(8) << f.mean_watch << std::setw(10) << f.by_category.t_stat << std::setw(10)
              << f.by_category.p_value << "  " << (pooled ? "yes" : "no") << '\n';
        }
      } else {
        out << io::to_json(report).dump(2) << '\n';
      }
      return kOk;
    }

    if (*kappa) {
      const auto a = parse_rating_list(io::read_file(kappa_a));
      const auto b = parse_rating_list(io::read_file(kappa_b));
      const auto weighting = kappa_weights == "linear" ? stats::KappaWeighting::Linear : stats::KappaWeighting::Unweighted;
      const double k = stats::cohen_kappa(stats::AgreementMatrix::from_ratings(a, b), weighting);
      const bool below = stats::kappa_below_gate(k);
      if (table) {
        out << std::setprecision(4) << std::fixed << "kappa " << k << (below ? "  below 0.80 gate\n" : "  ok\n");
      } else {
        out << io::Json{{"kappa", k}, {"weights", kappa_weights}, {"items", a.size()}, {"gate", stats::kKappaGate},
                        {"below_gate", below}}
                   .dump(2)
            << '\n';
      }
      return kOk;
    }

    if (*simulate) {
      pipeline::SynthSpec spec = simulate_spec.empty()
                                     ? pipeline::SynthSpec::from_model(bundled_baseline_model(), 127, 0.3, 0)
                                     : io::synth_spec_from_json(io::parse_json(io::read_file(simulate_spec)));
      if (!simulate_emit.empty()) {
        io::save_dataset(pipeline::generate_synthetic(spec), simulate_emit);
        return kOk;
      }
      const auto report = pipeline::recovery_experiment(spec, simulate_trials);
      if (table) {
        out << "trials " << report.trials << "\nrecall " << report.recall << "\nexact_match " << report.exact_match
            << '\n';
      } else {
        out << io::to_json(report).dump(2) << '\n';
      }
      return kOk;
    }

    if (*serve) {
      std::optional<Rubric> rubric;
      if (std::filesystem::exists(serve_rubric)) rubric = io::load_rubric(serve_rubric);
      std::vector<io::ModelDocument> models;
      if (!serve_models_dir.empty()) {
        for (const auto& entry : std::filesystem::directory_iterator(serve_models_dir)) {
          if (entry.path().extension() == ".json") models.push_back(io::load_model(entry.path().string()));
        }
      }
      const service::Service svc(std::move(rubric), std::move(models));
      auto server = service::make_http_server(svc);
      err << "listening on " << serve_host << ':' << serve_port << std::endl;
      if (!server->listen(serve_host, serve_port)) {
        err << "could not bind " << serve_host << ':' << serve_port << '\n';
        return kDataError;
      }
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? kNumericalError : kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace rww::cli
