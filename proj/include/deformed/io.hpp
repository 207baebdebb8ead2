// SPDX-License-Identifier: Apache-2.0
#pragma once

/// JSON and CSV encodings of families, distributions and reports.
///
///   family : {"kind":"tsallis","kappa":0.5} | {"kind":"piecewise_linear","base":2}
///            | {"kind":"shannon"} | {"kind":"sqrt_log"} | ...
///   pdf    : {"weights":[0.5,0.5]}  or CSV with one weight per line and an
///            optional non-numeric header line.
///
/// Objects are emitted with a fixed key order; doubles use the shortest
/// representation that round-trips, and non-finite values become null.

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "deformed/bounds.hpp"
#include "deformed/distributions.hpp"
#include "deformed/errors.hpp"
#include "deformed/log_family.hpp"
#include "deformed/scan.hpp"

namespace deformed::io {

using Json = nlohmann::ordered_json;

/// Raised on malformed files or JSON documents.
class InputError : public Error {
 public:
  using Error::Error;
};

inline Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline Json number(const std::optional<double>& x) {
  return x ? number(*x) : Json(nullptr);
}

inline Json family_to_json(const LogFamily& fam) {
  Json j;
  j["kind"] = std::string(to_string(fam.kind()));
  if (fam.kappa()) j["kappa"] = *fam.kappa();
  if (fam.base()) j["base"] = *fam.base();
  if (fam.kind() == FamilyKind::custom) j["name"] = fam.custom_spec()->name;
  return j;
}

inline double required_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ParamError(std::string("family spec needs numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

inline LogFamily family_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ParamError("family spec must be an object with a string 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "shannon") return LogFamily::shannon();
  if (kind == "tsallis") return LogFamily::tsallis(required_number(j, "kappa"));
  if (kind == "kaniadakis") return LogFamily::kaniadakis(required_number(j, "kappa"));
  if (kind == "kappa_maxwell") {
    return LogFamily::kappa_maxwell(required_number(j, "kappa"));
  }
  if (kind == "sqrt_log") return LogFamily::sqrt_log();
  if (kind == "piecewise_linear") {
    return LogFamily::piecewise_linear(required_number(j, "base"));
  }
  if (kind == "custom") {
    throw ParamError("custom families are available through the library only");
  }
  throw ParamError("unknown family kind '" + kind + "'");
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(origin + ": invalid JSON: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Accepts an inline JSON object or a path to a file holding one.
inline LogFamily family_from_argument(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  const bool inline_json = first != std::string::npos && arg[first] == '{';
  const std::string text = inline_json ? arg : read_file(arg);
  return family_from_json(parse_json(text, inline_json ? "--family" : arg));
}

inline Json pdf_to_json(const Pdf& p) {
  Json j;
  j["weights"] = p.vector();
  return j;
}

inline Pdf pdf_from_json(const Json& j, double tol = kDefaultPdfTol) {
  if (!j.is_object() || !j.contains("weights") || !j.at("weights").is_array()) {
    throw InputError("pdf JSON must be an object with a 'weights' array");
  }
  std::vector<double> w;
  for (const auto& x : j.at("weights")) {
    if (!x.is_number()) throw InputError("pdf weights must be numbers");
    w.push_back(x.get<double>());
  }
  return Pdf::validate(std::move(w), tol);
}

/// One weight per line; blank lines are ignored and a non-numeric first line
/// is treated as a header.
inline Pdf pdf_from_csv(const std::string& text, double tol = kDefaultPdfTol) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> w;
  bool first = true;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r,");
    const std::string cell = line.substr(b, e - b + 1);
    std::size_t used = 0;
    double value = 0.0;
    bool numeric = true;
    try {
      value = std::stod(cell, &used);
      numeric = used == cell.size();
    } catch (const std::exception&) {
      numeric = false;
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError("CSV line is not a number: '" + cell + "'");
    }
    first = false;
    w.push_back(value);
  }
  return Pdf::validate(std::move(w), tol);
}

inline Pdf read_pdf_file(const std::string& path, double tol = kDefaultPdfTol) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return pdf_from_json(parse_json(text, path), tol);
  }
  return pdf_from_csv(text, tol);
}

inline Json report_to_json(const BoundReport& r) {
  Json j;
  j["bound_id"] = std::string(to_string(r.bound_id));
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["ratio"] = number(r.ratio);
  j["holds"] = r.holds;
  j["tol"] = number(r.tol);
  j["inputs_digest"] = r.inputs_digest;
  return j;
}

inline Json witness_to_json(const Witness& w) {
  Json j;
  j["trial"] = w.trial;
  j["family"] = family_to_json(w.family);
  j["p"] = pdf_to_json(w.inputs.p);
  j["q"] = pdf_to_json(w.inputs.q);
  const BoundId id = w.report.bound_id;
  if (id == BoundId::relent_I || id == BoundId::relent_D) {
    j["r"] = pdf_to_json(w.inputs.r);
  }
  if (id == BoundId::condition1_segment) {
    j["lambda"] = w.inputs.lambda;
    j["mu"] = w.inputs.mu;
    j["epsilon"] = w.inputs.epsilon;
  }
  j["report"] = report_to_json(w.report);
  return j;
}

inline Json optional_witness(const std::optional<Witness>& w) {
  return w ? witness_to_json(*w) : Json(nullptr);
}

inline Json scan_report_to_json(const ScanReport& s, const ScanConfig& config) {
  Json j;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  Json cfg;
  Json fams = Json::array();
  for (const auto& f : config.families) fams.push_back(family_to_json(f));
  cfg["families"] = fams;
  cfg["dims"] = config.dims;
  Json modes = Json::array();
  for (ScanMode m : config.modes) modes.push_back(std::string(to_string(m)));
  cfg["modes"] = modes;
  cfg["tv_exponents"] = {config.min_tv_exponent, config.max_tv_exponent};
  cfg["epsilons"] = config.epsilons;
  cfg["hill_climb_steps"] = config.hill_climb_steps;
  cfg["rel_tol"] = config.bound_options.rel_tol;
  j["config"] = cfg;
  j["ok"] = s.ok();
  j["violations"] = s.violations;
  j["worst_ratio"] = number(s.worst_ratio);
  j["worst_bound"] =
      s.worst_bound ? Json(std::string(to_string(*s.worst_bound))) : Json(nullptr);
  j["witness"] = optional_witness(s.witness());
  Json per = Json::array();
  for (const BoundTally& t : s.per_bound) {
    Json b;
    b["bound_id"] = std::string(to_string(t.bound_id));
    b["evaluated"] = t.evaluated;
    b["skipped_support"] = t.skipped_support;
    b["not_applicable"] = t.not_applicable;
    b["violations"] = t.violations;
    b["worst_ratio"] = number(t.worst_ratio);
    b["witness"] = optional_witness(t.witness);
    b["first_violation"] = optional_witness(t.first_violation);
    per.push_back(b);
  }
  j["per_bound"] = per;
  return j;
}

}  // namespace deformed::io
