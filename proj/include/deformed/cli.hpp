// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Command-line front end. `run` is the whole program minus process setup,
/// so tests drive it in-process.
///
/// Exit codes: 0 success, 1 input or usage error, 2 a checked bound failed.

#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deformed/bounds.hpp"
#include "deformed/distributions.hpp"
#include "deformed/errors.hpp"
#include "deformed/fisher.hpp"
#include "deformed/functionals.hpp"
#include "deformed/io.hpp"
#include "deformed/log_family.hpp"
#include "deformed/scan.hpp"

namespace deformed::cli {

using io::Json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitViolation = 2;

inline constexpr const char* kTableBanner =
    "# human-readable summary, not for parsing; use --format json";

namespace detail {

/// Accepts inline JSON ({"weights":[...]}) or a JSON/CSV file path.
inline Pdf pdf_from_argument(const std::string& arg, double tol) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') {
    return io::pdf_from_json(io::parse_json(arg, "pdf argument"), tol);
  }
  return io::read_pdf_file(arg, tol);
}

inline std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
      throw io::InputError(std::string(what) + ": '" + cell + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw io::InputError(std::string(what) + ": empty list");
  return out;
}

inline void flatten(const Json& j, const std::string& path,
                    std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      flatten(v, path.empty() ? k : path + "." + k, rows);
    }
  } else if (j.is_array() && !j.empty() &&
             (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], path + "[" + std::to_string(i) + "]", rows);
    }
  } else {
    rows.emplace_back(path.empty() ? "value" : path, j.dump());
  }
}

inline void emit(const Json& j, bool table, std::ostream& out) {
  if (!table) {
    out << j.dump(2) << '\n';
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  out << kTableBanner << '\n';
  for (const auto& [k, v] : rows) {
    out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(io::number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline Json catalogue() {
  auto entry = [](const char* kind, const char* params, const char* range,
                  const char* example) {
    Json e;
    e["kind"] = kind;
    e["parameters"] = params;
    e["range"] = range;
    e["example"] = io::parse_json(example, "catalogue");
    return e;
  };
  Json list = Json::array();
  list.push_back(entry("shannon", "", "", R"({"kind":"shannon"})"));
  list.push_back(entry("tsallis", "kappa", "-1 < kappa < 1, kappa != 0",
                       R"({"kind":"tsallis","kappa":0.5})"));
  list.push_back(entry("kaniadakis", "kappa", "-1 < kappa < 1, kappa != 0",
                       R"({"kind":"kaniadakis","kappa":0.5})"));
  list.push_back(entry("kappa_maxwell", "kappa", "kappa > 0",
                       R"({"kind":"kappa_maxwell","kappa":2})"));
  list.push_back(entry("sqrt_log", "", "", R"({"kind":"sqrt_log"})"));
  list.push_back(entry("piecewise_linear", "base", "base > 1",
                       R"({"kind":"piecewise_linear","base":2})"));
  Json j;
  j["families"] = list;
  return j;
}

inline Json family_summary(const LogFamily& fam) {
  Json j = io::family_to_json(fam);
  j["F_zero"] = io::number(fam.f_zero());
  j["ln_at_zero"] = io::number(fam.ln_at_zero());
  j["ln_at_infinity"] = io::number(fam.ln_at_infinity());
  j["omega_at_zero"] = io::number(fam.omega_at_zero());
  return j;
}

template <class F>
Json guarded(F&& f) {
  try {
    return io::number(f());
  } catch (const SupportError&) {
    return nullptr;
  } catch (const NonDifferentiableError&) {
    return nullptr;
  }
}

}  // namespace detail

/// Parses args (without the program name), runs one command, writes the
/// report to `out` and diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Deformed-logarithm entropies: evaluation, bound checks and scans",
               "deformed_cli"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "table"}));

  std::string family_arg;
  double rel_tol = BoundOptions{}.rel_tol;
  double pdf_tol = kDefaultPdfTol;

  auto* families = app.add_subcommand("families", "List the built-in families");

  auto* eval = app.add_subcommand("eval", "Evaluate ln, exp, F and omega at points");
  std::string xs_arg;
  eval->add_option("--family", family_arg, "Family JSON or file")->required();
  eval->add_option("--x", xs_arg, "Comma-separated points")->required();

  auto* entropy_cmd = app.add_subcommand("entropy", "Entropy of a pdf");
  std::string pdf_arg;
  entropy_cmd->add_option("--family", family_arg, "Family JSON or file")->required();
  entropy_cmd->add_option("--pdf", pdf_arg, "Pdf JSON/CSV file or inline JSON")
      ->required();
  entropy_cmd->add_option("--pdf-tol", pdf_tol, "Tolerance on the weight sum");

  auto* divergence_cmd =
      app.add_subcommand("divergence", "Relative entropy and divergence of p from q");
  std::string p_arg;
  std::string q_arg;
  divergence_cmd->add_option("--family", family_arg, "Family JSON or file")
      ->required();
  divergence_cmd->add_option("--p", p_arg, "First pdf")->required();
  divergence_cmd->add_option("--q", q_arg, "Second pdf")->required();
  divergence_cmd->add_option("--pdf-tol", pdf_tol, "Tolerance on the weight sum");

  auto* bounds_cmd = app.add_subcommand("bounds", "Check every applicable bound");
  std::string r_arg;
  std::vector<std::string> bound_names;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<double> epsilon;
  bounds_cmd->add_option("--family", family_arg, "Family JSON or file")->required();
  bounds_cmd->add_option("--p", p_arg, "First pdf")->required();
  bounds_cmd->add_option("--q", q_arg, "Second pdf")->required();
  bounds_cmd->add_option("--r", r_arg, "Reference pdf for relent_I/relent_D");
  bounds_cmd->add_option("--lambda", lambda, "Segment parameter lambda");
  bounds_cmd->add_option("--mu", mu, "Segment parameter mu");
  bounds_cmd->add_option("--epsilon", epsilon, "Condition-1 epsilon");
  bounds_cmd->add_option("--bound", bound_names, "Restrict to these bound ids")
      ->delimiter(',');
  bounds_cmd->add_option("--tol", rel_tol, "Relative tolerance of each check");
  bounds_cmd->add_option("--pdf-tol", pdf_tol, "Tolerance on the weight sum");

  auto* scan_cmd = app.add_subcommand("scan", "Randomised scan of all bounds");
  ScanConfig config;
  std::string dims_arg = "2,4,16,64";
  std::string families_arg;
  std::vector<std::string> mode_names;
  scan_cmd->add_option("--trials", config.trials, "Number of trials")
      ->capture_default_str();
  scan_cmd->add_option("--dims", dims_arg, "Comma-separated dimensions")
      ->capture_default_str();
  scan_cmd->add_option("--seed", config.seed, "Seed")->capture_default_str();
  scan_cmd->add_option("--families", families_arg,
                       "JSON array of family specs, or a file holding one");
  scan_cmd->add_option("--modes", mode_names,
                       "uniform,sparse,neighbor,hill_climb")
      ->delimiter(',');
  scan_cmd->add_option("--hill-climb-steps", config.hill_climb_steps,
                       "Transfers per hill-climb trial")
      ->capture_default_str();
  scan_cmd->add_option("--threads", config.threads, "Worker threads")
      ->capture_default_str();
  scan_cmd->add_option("--tol", rel_tol, "Relative tolerance of each check");

  auto* fisher_cmd = app.add_subcommand("fisher", "Fisher metrics of a demo model");
  std::string model_name = "bernoulli";
  std::string theta_arg;
  std::string dtheta_arg;
  std::size_t states = 3;
  fisher_cmd->add_option("--family", family_arg, "Family JSON or file")->required();
  fisher_cmd->add_option("--model", model_name, "Demo model")
      ->check(CLI::IsMember({"bernoulli", "softmax", "binomial_mixture"}))
      ->capture_default_str();
  fisher_cmd->add_option("--theta", theta_arg, "Comma-separated parameters")
      ->required();
  fisher_cmd->add_option("--dtheta", dtheta_arg,
                         "Displacement for the expansion check");
  fisher_cmd->add_option("--states", states, "Number of softmax states")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }

  const bool table = format == "table";
  BoundOptions opts;
  opts.rel_tol = rel_tol;

  try {
    if (families->parsed()) {
      detail::emit(detail::catalogue(), table, out);
      return kExitOk;
    }

    if (eval->parsed()) {
      const LogFamily fam = io::family_from_argument(family_arg);
      Json j;
      j["family"] = detail::family_summary(fam);
      Json points = Json::array();
      for (double x : detail::parse_list(xs_arg, "--x")) {
        if (!(x >= 0.0)) throw DomainError("--x values must be >= 0");
        Json pt;
        pt["x"] = x;
        pt["ln"] = x > 0.0 ? io::number(ln_phi(fam, x)) : io::number(fam.ln_at_zero());
        pt["exp"] = io::number(exp_phi(fam, x));
        pt["F"] = io::number(big_f(fam, x));
        pt["omega"] =
            io::number(x > 0.0 ? omega_phi(fam, x) : fam.omega_at_zero());
        pt["ln_prime"] =
            x > 0.0 ? detail::guarded([&] { return ln_phi_prime(fam, x); })
                    : Json(nullptr);
        points.push_back(pt);
      }
      j["points"] = points;
      detail::emit(j, table, out);
      return kExitOk;
    }

    if (entropy_cmd->parsed()) {
      const LogFamily fam = io::family_from_argument(family_arg);
      const Pdf p = detail::pdf_from_argument(pdf_arg, pdf_tol);
      Json j;
      j["entropy"] = io::number(entropy(fam, p));
      detail::emit(j, table, out);
      return kExitOk;
    }

    if (divergence_cmd->parsed()) {
      const LogFamily fam = io::family_from_argument(family_arg);
      const Pdf p = detail::pdf_from_argument(p_arg, pdf_tol);
      const Pdf q = detail::pdf_from_argument(q_arg, pdf_tol);
      require_same_length(p, q);
      Json j;
      j["rel_entropy"] = detail::guarded([&] { return rel_entropy(fam, p, q); });
      j["divergence"] = detail::guarded([&] { return divergence(fam, p, q); });
      detail::emit(j, table, out);
      return kExitOk;
    }

    if (bounds_cmd->parsed()) {
      const LogFamily fam = io::family_from_argument(family_arg);
      TrialInputs in;
      in.p = detail::pdf_from_argument(p_arg, pdf_tol);
      in.q = detail::pdf_from_argument(q_arg, pdf_tol);
      require_same_length(in.p, in.q);
      const bool have_r = !r_arg.empty();
      if (have_r) {
        in.r = detail::pdf_from_argument(r_arg, pdf_tol);
        require_same_length(in.p, in.r);
      }
      const int segment_args = lambda.has_value() + mu.has_value() + epsilon.has_value();
      if (segment_args != 0 && segment_args != 3) {
        throw io::InputError("--lambda, --mu and --epsilon go together");
      }
      if (segment_args == 3) {
        in.lambda = *lambda;
        in.mu = *mu;
        in.epsilon = *epsilon;
      }

      std::vector<BoundId> ids;
      const bool explicit_ids = !bound_names.empty();
      if (explicit_ids) {
        for (const auto& name : bound_names) {
          const auto id = bound_from_string(name);
          if (!id) throw io::InputError("unknown bound id '" + name + "'");
          ids.push_back(*id);
        }
      } else {
        ids.assign(kAllBounds.begin(), kAllBounds.end());
      }

      Json reports = Json::array();
      bool violated = false;
      for (BoundId id : ids) {
        const bool needs_r = id == BoundId::relent_I || id == BoundId::relent_D;
        const bool needs_segment = id == BoundId::condition1_segment;
        if ((needs_r && !have_r) || (needs_segment && segment_args != 3)) {
          if (explicit_ids) {
            throw io::InputError(std::string(to_string(id)) +
                                 " needs additional inputs");
          }
          continue;
        }
        if (!explicit_ids && !bound_applies(id, fam)) continue;
        try {
          const BoundReport rep = evaluate_bound(id, fam, in, opts);
          violated = violated || !rep.holds;
          reports.push_back(io::report_to_json(rep));
        } catch (const SupportError&) {
          if (explicit_ids) throw;
        } catch (const RangeError&) {
          if (explicit_ids) throw;
        } catch (const IdenticalPdfs&) {
          if (explicit_ids) throw;
        }
      }
      detail::emit(reports, table, out);
      return violated ? kExitViolation : kExitOk;
    }

    if (scan_cmd->parsed()) {
      config.bound_options = opts;
      config.dims.clear();
      for (double d : detail::parse_list(dims_arg, "--dims")) {
        if (!(d >= 1.0) || d != static_cast<double>(static_cast<std::size_t>(d))) {
          throw io::InputError("--dims entries must be positive integers");
        }
        config.dims.push_back(static_cast<std::size_t>(d));
      }
      if (!families_arg.empty()) {
        const auto first = families_arg.find_first_not_of(" \t\r\n");
        const bool inline_json = first != std::string::npos && families_arg[first] == '[';
        const Json arr = io::parse_json(
            inline_json ? families_arg : io::read_file(families_arg), "--families");
        if (!arr.is_array() || arr.empty()) {
          throw io::InputError("--families must be a non-empty JSON array");
        }
        config.families.clear();
        for (const auto& f : arr) config.families.push_back(io::family_from_json(f));
      }
      if (!mode_names.empty()) {
        config.modes.clear();
        for (const auto& name : mode_names) {
          const auto m = scan_mode_from_string(name);
          if (!m) throw io::InputError("unknown scan mode '" + name + "'");
          config.modes.push_back(*m);
        }
      }
      const ScanReport report = stability_scan(config);
      detail::emit(io::scan_report_to_json(report, config), table, out);
      return report.ok() ? kExitOk : kExitViolation;
    }

    if (fisher_cmd->parsed()) {
      const LogFamily fam = io::family_from_argument(family_arg);
      ParametricModel model = model_name == "softmax" ? models::softmax(states)
                              : model_name == "binomial_mixture"
                                  ? models::binomial_mixture()
                                  : models::bernoulli();
      const std::vector<double> theta = detail::parse_list(theta_arg, "--theta");
      if (theta.size() != model.dim_theta) {
        throw io::InputError(model.name + " takes " +
                             std::to_string(model.dim_theta) + " parameters");
      }
      Json j;
      j["family"] = io::family_to_json(fam);
      j["model"] = model.name;
      j["theta"] = theta;
      j["p"] = model.eval(theta).vector();
      try {
        j["g1"] = detail::matrix_to_json(fisher_g1(fam, model, theta));
      } catch (const NonDifferentiableError&) {
        j["g1"] = nullptr;
      }
      j["g2"] = detail::matrix_to_json(fisher_g2(fam, model, theta));
      if (!dtheta_arg.empty()) {
        const std::vector<double> dtheta = detail::parse_list(dtheta_arg, "--dtheta");
        const ExpansionReport e = expansion_check(fam, model, theta, dtheta);
        Json x;
        x["rel_entropy_forward"] = io::number(e.rel_entropy_forward);
        x["rel_entropy_backward"] = io::number(e.rel_entropy_backward);
        x["divergence_forward"] = io::number(e.divergence_forward);
        x["quad_g1"] = io::number(e.quad_g1);
        x["quad_g2"] = io::number(e.quad_g2);
        x["r1"] = io::number(e.r1);
        x["r2"] = io::number(e.r2);
        x["symmetry"] = io::number(e.symmetry);
        j["expansion"] = x;
      }
      detail::emit(j, table, out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  err << app.help();
  return kExitInput;
}

}  // namespace deformed::cli
