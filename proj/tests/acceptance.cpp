// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "deformed/deformed.hpp"

namespace {

using namespace deformed;
using io::Json;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<LogFamily> smooth(const std::vector<LogFamily>& fams) {
  std::vector<LogFamily> out;
  for (const auto& f : fams) {
    if (f.kind() != FamilyKind::piecewise_linear) out.push_back(f);
  }
  return out;
}

Pdf draw(SimplexSampler& s, std::size_t n, bool allow_sparse) {
  return allow_sparse && s.rng().below(3) == 0 ? s.sparse(n) : s.uniform(n);
}

// 1 -------------------------------------------------------------------------
Outcome theorem_suite() {
  ScanConfig c;
  c.trials = 100000;
  c.threads = 1;
  const auto start = std::chrono::steady_clock::now();
  const ScanReport r = stability_scan(c);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string unevaluated;
  for (const BoundTally& t : r.per_bound) {
    if (t.evaluated == 0) unevaluated += " " + std::string(to_string(t.bound_id));
  }
  const bool all_evaluated = unevaluated.empty();
  const bool pass = r.ok(1e-9) && r.violations == 0 && all_evaluated && secs <= 300.0;
  return {pass, "trials=" + std::to_string(r.trials) +
                    " violations=" + std::to_string(r.violations) + " worst_ratio=" +
                    fmt(r.worst_ratio.value_or(0.0)) + " (" +
                    std::string(r.worst_bound ? to_string(*r.worst_bound) : "none") +
                    ") single-thread " + fmt(secs) + "s" +
                    (all_evaluated ? "" : ", never evaluated:" + unevaluated)};
}

// 2 -------------------------------------------------------------------------
Outcome closed_forms() {
  SimplexSampler s(SplitMix64(2));
  const std::array<double, 6> kappas = {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9};
  double worst_t = 0.0;
  double worst_k = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pdf p = draw(s, 2 + s.rng().below(63), true);
    for (double k : kappas) {
      worst_t = std::max(worst_t, rel_diff(entropy(LogFamily::tsallis(k), p),
                                           closed_form::tsallis_entropy(k, p)));
      worst_k = std::max(worst_k, rel_diff(entropy(LogFamily::kaniadakis(k), p),
                                           closed_form::kaniadakis_entropy(k, p)));
    }
  }
  return {worst_t <= 1e-10 && worst_k <= 1e-10,
          "1000 pdfs x 6 kappa: max rel err tsallis=" + fmt(worst_t) +
              " kaniadakis=" + fmt(worst_k)};
}

// 3 -------------------------------------------------------------------------
Outcome quadrature_golden() {
  struct Case {
    LogFamily fam;
    double analytic;
    double singularity;
  };
  std::vector<Case> cases = {{LogFamily::shannon(), 1.0, 0.0},
                             {LogFamily::sqrt_log(), 1.0 / 3.0, 0.0}};
  for (double k : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
    cases.push_back({LogFamily::tsallis(k), 1.0, std::max(0.0, -k)});
    cases.push_back({LogFamily::kaniadakis(k), 1.0 / (1.0 - k * k), std::abs(k)});
  }
  for (double k : {0.5, 1.0, 2.0, 5.0}) {
    cases.push_back({LogFamily::kappa_maxwell(k), 1.0, 1.0 / (1.0 + k)});
  }
  double worst = 0.0;
  for (const Case& c : cases) {
    const double q = -numerics::integrate([&](double x) { return ln_phi(c.fam, x); }, 0.0,
                                          1.0, {}, c.singularity);
    worst = std::max(worst, std::abs(q - c.analytic));
  }
  return {worst <= 1e-8,
          std::to_string(cases.size()) + " families: max |quadrature - analytic| = " +
              fmt(worst)};
}

// 4 -------------------------------------------------------------------------
Outcome coincidences() {
  SimplexSampler s(SplitMix64(4));
  const auto fams = default_scan_families();
  double improved = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 2 + s.rng().below(30);
    const std::size_t cut = 1 + s.rng().below(n - 1);
    std::vector<double> a(n, 0.0);
    std::vector<double> b(n, 0.0);
    const Pdf left = s.uniform(cut);
    const Pdf right = s.uniform(n - cut);
    for (std::size_t k = 0; k < cut; ++k) a[k] = left[k];
    for (std::size_t k = cut; k < n; ++k) b[k] = right[k - cut];
    const Pdf p = Pdf::validate(a);
    const Pdf q = mix(p, Pdf::validate(b), 0.5);
    if (std::abs(tv_norm(p, q) - 1.0) > 1e-15) continue;
    for (const auto& fam : fams) {
      improved = std::max(improved,
                          std::abs(improved_rhs(fam, p, q) - metric_d(fam, p, q)));
    }
  }
  double special = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + s.rng().below(64);
    const Pdf p = draw(s, n, true);
    const Pdf q = draw(s, n, true);
    special = std::max(special, std::abs(metric_d(LogFamily::shannon(), p, q) -
                                         cont1_rhs_shannon_form(p, q)));
    for (double k : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
      special = std::max(special, std::abs(metric_d(LogFamily::tsallis(k), p, q) -
                                           cont1_rhs_tsallis_form(k, p, q)));
    }
  }
  double rescale = 0.0;
  for (double k : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
    const LogFamily fam = LogFamily::tsallis(k);
    for (double n : {2.0, 4.0, 16.0, 64.0}) {
      for (int e = 0; e <= 12; ++e) {
        const double t = std::pow(10.0, -0.5 * e);
        const double lhs = omega_phi(fam, n / t);
        const double rhs =
            (1.0 - std::pow(t, k)) / k + std::pow(t, k) * omega_phi(fam, n);
        rescale = std::max(rescale, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
      }
    }
  }
  double limit = 0.0;
  for (double n : {2.0, 4.0, 16.0, 64.0}) {
    const double imax_t = omega_phi(LogFamily::tsallis(1e-4), n);
    const double imax_s = std::log(n);
    for (int e = 0; e <= 12; ++e) {
      const double t = std::pow(10.0, -0.5 * e);
      limit = std::max(limit, std::abs(lesche3_rhs(1e-4, imax_t, t) -
                                       lesche4_rhs(imax_s, t)));
    }
  }
  const bool pass =
      improved <= 1e-10 && special <= 1e-12 && rescale <= 1e-12 && limit <= 1e-2;
  return {pass, "improved-vs-cont1 at tv=1 " + fmt(improved) + ", specialised forms " +
                    fmt(special) + ", omega rescaling " + fmt(rescale) +
                    ", lesche3(1e-4) vs lesche4 " + fmt(limit)};
}

// 5 -------------------------------------------------------------------------
Outcome bregman() {
  SimplexSampler s(SplitMix64(5));
  const auto fams = default_scan_families();
  double worst = 0.0;
  double shannon = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const LogFamily& fam = fams[static_cast<std::size_t>(i) % fams.size()];
    const std::size_t n = 1 + s.rng().below(64);
    const Pdf p = draw(s, n, true);
    const Pdf q = s.uniform(n);
    numerics::CompensatedSum oracle;
    for (std::size_t k = 0; k < n; ++k) {
      const double f_prime_q = ln_phi(fam, q[k]) + fam.f_zero();
      oracle += bregman_f(fam, p[k]) - bregman_f(fam, q[k]) - (p[k] - q[k]) * f_prime_q;
    }
    worst = std::max(worst, std::abs(divergence(fam, p, q) - oracle.value()));
    const LogFamily sh = LogFamily::shannon();
    shannon = std::max(shannon, std::abs(divergence(sh, p, q) - rel_entropy(sh, p, q)));
  }
  return {worst <= 1e-10 && shannon <= 1e-10,
          "1000 pairs: |D - Bregman| max " + fmt(worst) + ", shannon |D - I(p||q)| max " +
              fmt(shannon)};
}

// 6 -------------------------------------------------------------------------
Outcome fisher() {
  const auto fams = smooth(default_scan_families());
  const ParametricModel bern = models::bernoulli();
  const std::vector<double> half = {0.5};
  double g1_err = 0.0;
  double g2_err = 0.0;
  for (const auto& fam : fams) {
    g1_err = std::max(g1_err, rel_diff(fisher_g1(fam, bern, half)(0, 0),
                                       ln_phi_prime(fam, 1.0) * 4.0));
    g2_err = std::max(g2_err, rel_diff(fisher_g2(fam, bern, half)(0, 0),
                                       2.0 * ln_phi_prime(fam, 0.5)));
  }
  struct Point {
    ParametricModel model;
    std::vector<double> theta;
    std::vector<double> direction;
  };
  const std::vector<Point> points = {
      {bern, {0.5}, {1.0}},
      {bern, {0.3}, {1.0}},
      {models::softmax(3), {0.2, -0.4}, {1.0, 0.5}},
      {models::binomial_mixture(), {0.4, 0.3}, {1.0, -1.0}}};
  double min_order = std::numeric_limits<double>::infinity();
  double shannon = 0.0;
  for (const Point& pt : points) {
    for (const auto& fam : fams) {
      min_order = std::min(
          min_order, expansion_ladder(fam, pt.model, pt.theta, pt.direction).min_order);
    }
    const Matrix g1 = fisher_g1(LogFamily::shannon(), pt.model, pt.theta);
    const Matrix g2 = fisher_g2(LogFamily::shannon(), pt.model, pt.theta);
    for (std::size_t i = 0; i < g1.rows(); ++i) {
      for (std::size_t j = 0; j < g1.cols(); ++j) {
        shannon = std::max(shannon, rel_diff(g1(i, j), g2(i, j)));
      }
    }
  }
  const bool pass = g1_err <= 1e-5 && g2_err <= 1e-5 && min_order >= 2.8 &&
                    shannon <= 1e-6;
  return {pass, "bernoulli g1 rel err " + fmt(g1_err) + ", g2 rel err " + fmt(g2_err) +
                    ", min ladder order " + fmt(min_order) + ", shannon g1 vs g2 " +
                    fmt(shannon)};
}

// 7 -------------------------------------------------------------------------
Outcome metric_axioms() {
  SimplexSampler s(SplitMix64(7));
  const auto fams = default_scan_families();
  double slack = std::numeric_limits<double>::infinity();
  bool symmetric = true;
  double identity = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const LogFamily& fam = fams[static_cast<std::size_t>(i) % fams.size()];
    const std::size_t n = 1 + s.rng().below(16);
    const Pdf p = draw(s, n, true);
    const Pdf q = draw(s, n, true);
    const Pdf t = draw(s, n, true);
    const Pdf r = s.uniform(n);
    const double cap = 0.5 + s.rng().uniform();
    const std::array<std::function<double(const Pdf&, const Pdf&)>, 4> metrics = {
        [&](const Pdf& a, const Pdf& b) { return metric_d(fam, a, b); },
        [&](const Pdf& a, const Pdf& b) { return metric_d_capped(fam, a, b, cap); },
        [&](const Pdf& a, const Pdf& b) { return h_r(fam, a, b, r); },
        [&](const Pdf& a, const Pdf& b) { return e_r(fam, a, b, r); }};
    for (const auto& m : metrics) {
      slack = std::min(slack, m(p, q) + m(q, t) - m(p, t));
      symmetric = symmetric && m(p, q) == m(q, p);
      identity = std::max(identity, std::abs(m(p, p)));
    }
  }
  return {slack >= -1e-11 && symmetric && identity <= 1e-12,
          "10000 triples x {d, d_M, h_r, e_r}: min triangle slack " + fmt(slack) +
              (symmetric ? ", symmetric" : ", ASYMMETRIC") + ", max d(p,p) " +
              fmt(identity)};
}

// 8 -------------------------------------------------------------------------
Outcome condition1() {
  const std::array<LogFamily, 2> fams = {LogFamily::shannon(), LogFamily::tsallis(0.5)};
  const std::array<double, 3> eps = {0.1, 0.5, 1.0};
  const std::array<std::size_t, 4> dims = {2, 4, 16, 64};
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t failures = 0;
  const std::size_t trials = 100000;
  for (std::size_t i = 0; i < trials; ++i) {
    const LogFamily& fam = fams[i % 2];
    const double e = eps[(i / 2) % 3];
    const std::size_t n = dims[(i / 6) % 4];
    SimplexSampler s(SplitMix64::split(8, i));
    const double delta = condition1_delta(fam, e);
    Pdf p = Pdf::uniform(n);
    switch (s.rng().below(3)) {
      case 0: p = s.uniform(n); break;
      case 1: p = s.sparse(n); break;
      default: p = Pdf::point_mass(n, s.rng().below(n)); break;
    }
    const double radius = delta * std::max(1e-9, s.rng().uniform());
    const Pdf q = s.neighbor(p, radius);
    if (p == q) continue;
    const double lhs = std::abs(entropy(fam, p) - entropy(fam, q));
    const double rhs = e * entropy(fam, sym_diff(p, q));
    worst_excess = std::max(worst_excess, lhs - rhs);
    if (lhs > rhs + 1e-9) ++failures;
  }
  return {failures == 0, std::to_string(trials) +
                             " trials at tv <= delta(eps): violations " +
                             std::to_string(failures) + ", max |dI| - eps I(pDq) = " +
                             fmt(worst_excess)};
}

// 9 -------------------------------------------------------------------------
Outcome brute_force_minima() {
  const auto fams = default_scan_families();
  double worst = 0.0;
  bool lb_ok = true;
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<Pdf> candidates;
    const int m = 40;
    std::vector<int> c(n, 0);
    std::function<void(std::size_t, int)> grid = [&](std::size_t k, int left) {
      if (k + 1 == n) {
        c[k] = left;
        if (2 * left > m) return;
        std::vector<double> w(n);
        for (std::size_t j = 0; j < n; ++j) w[j] = static_cast<double>(c[j]) / m;
        candidates.push_back(Pdf::renormalize(w));
        return;
      }
      for (int v = 0; v <= std::min(left, m / 2); ++v) {
        c[k] = v;
        grid(k + 1, left - v);
      }
    };
    grid(0, m);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        std::vector<double> w(n, 0.0);
        w[a] = w[b] = 0.5;
        candidates.push_back(Pdf::validate(w));
      }
    }
    for (const auto& fam : fams) {
      double best = std::numeric_limits<double>::infinity();
      for (const Pdf& p : candidates) best = std::min(best, entropy(fam, p));
      const double expected = fam.f_zero() - 2.0 * big_f(fam, 0.5);
      worst = std::max(worst, std::abs(best - expected));
      lb_ok = lb_ok && sym_diff_entropy_lb(fam) <= best;
    }
  }
  return {worst <= 1e-6 && lb_ok,
          "n=2..4, 13 families: max |min I - (F(0) - 2F(1/2))| = " + fmt(worst) +
              (lb_ok ? ", lower bound below every minimum" : ", LOWER BOUND EXCEEDS MINIMUM")};
}

// 10 ------------------------------------------------------------------------
struct Captured {
  int status;
  std::string out;
};

Captured capture(const std::string& cmd) {
  Captured c{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  std::array<char, 65536> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) c.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

Outcome cli_reproducibility() {
  const std::string bin = DEFORMED_CLI_PATH;
  const Captured a = capture(bin + " scan");
  const Captured b = capture(bin + " scan");
  if (a.status != 0 || b.status != 0) {
    return {false, "scan exited with " + std::to_string(a.status) + "/" +
                       std::to_string(b.status)};
  }
  const bool identical = a.out == b.out;
  const Json report = Json::parse(a.out);
  std::size_t replayed = 0;
  std::size_t mismatched = 0;
  auto replay = [&](const std::string& bound, const Json& w) {
    std::string cmd = bin + " bounds --bound " + bound + " --family " +
                      quoted(w["family"].dump()) + " --p " + quoted(w["p"].dump()) +
                      " --q " + quoted(w["q"].dump());
    if (w.contains("r")) cmd += " --r " + quoted(w["r"].dump());
    if (w.contains("lambda")) {
      cmd += " --lambda " + w["lambda"].dump() + " --mu " + w["mu"].dump() +
             " --epsilon " + w["epsilon"].dump();
    }
    const Captured c = capture(cmd);
    ++replayed;
    const Json got = c.status == 0 || c.status == 2 ? Json::parse(c.out) : Json();
    if (!got.is_array() || got.size() != 1 || got[0] != w["report"]) ++mismatched;
  };
  if (!report["witness"].is_null()) {
    replay(report["worst_bound"].get<std::string>(), report["witness"]);
  }
  for (const auto& t : report["per_bound"]) {
    for (const char* key : {"witness", "first_violation"}) {
      if (!t[key].is_null()) replay(t["bound_id"].get<std::string>(), t[key]);
    }
  }
  return {identical && mismatched == 0 && replayed > 0,
          std::string("`deformed_cli scan` twice: ") +
              (identical ? "byte-identical (" : "DIFFERENT (") +
              std::to_string(a.out.size()) + " bytes); witnesses replayed " +
              std::to_string(replayed) + ", mismatched " + std::to_string(mismatched)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const std::array<Criterion, 10> criteria = {{
      {1, "inequality theorem suite", theorem_suite},
      {2, "closed-form/oracle agreement", closed_forms},
      {3, "quadrature golden values", quadrature_golden},
      {4, "coincidence identities", coincidences},
      {5, "Bregman equivalence", bregman},
      {6, "Fisher metrics", fisher},
      {7, "metric axioms", metric_axioms},
      {8, "Condition-1 constructivity", condition1},
      {9, "brute-force minima", brute_force_minima},
      {10, "CLI reproducibility", cli_reproducibility},
  }};
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": "
              << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all 10 criteria pass" : std::to_string(failed) + " failing")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
