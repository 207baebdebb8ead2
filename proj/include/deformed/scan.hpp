// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Randomised adversarial scan of every continuity inequality.
///
/// Trial i draws from SplitMix64::split(seed, i) only, and cycles
/// deterministically through families, dimensions and modes:
///
///   family = families[i % F]
///   dim    = dims[(i / F) % D]
///   mode   = modes[(i / (F D)) % M]
///
/// so the report is identical for any worker count. Within a trial the draws
/// are, in order: p and q (per mode), r (sparse with probability 1/4, else
/// uniform), the epsilon index, lambda, and the mu offset. Hill-climb trials
/// then pick a target bound and apply at most `hill_climb_steps` coordinate
/// pair mass transfers, keeping a transfer only if it raises the target's
/// lhs/rhs ratio; the step halves after every 10 consecutive rejections.
/// Transfers that rounding would make unequal on the two coordinates are
/// rejected, and a pair whose difference is one-signed (totals differing
/// only by rounding) counts as not applicable for every bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "deformed/bounds.hpp"
#include "deformed/distributions.hpp"
#include "deformed/errors.hpp"
#include "deformed/log_family.hpp"

namespace deformed {

inline constexpr std::uint64_t kDefaultSeed = 2004;

enum class ScanMode { uniform, sparse, neighbor, hill_climb };

inline std::string_view to_string(ScanMode mode) {
  switch (mode) {
    case ScanMode::uniform: return "uniform";
    case ScanMode::sparse: return "sparse";
    case ScanMode::neighbor: return "neighbor";
    case ScanMode::hill_climb: return "hill_climb";
  }
  return "unknown";
}

inline std::optional<ScanMode> scan_mode_from_string(std::string_view name) {
  for (ScanMode m : {ScanMode::uniform, ScanMode::sparse, ScanMode::neighbor,
                     ScanMode::hill_climb}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

/// shannon, tsallis kappa in {+-0.1, +-0.5, +-0.9}, kaniadakis +-0.5,
/// kappa_maxwell {0.5, 2}, sqrt_log and piecewise_linear base 2.
inline std::vector<LogFamily> default_scan_families() {
  return {LogFamily::shannon(),
          LogFamily::tsallis(0.1),
          LogFamily::tsallis(-0.1),
          LogFamily::tsallis(0.5),
          LogFamily::tsallis(-0.5),
          LogFamily::tsallis(0.9),
          LogFamily::tsallis(-0.9),
          LogFamily::kaniadakis(0.5),
          LogFamily::kaniadakis(-0.5),
          LogFamily::kappa_maxwell(0.5),
          LogFamily::kappa_maxwell(2.0),
          LogFamily::sqrt_log(),
          LogFamily::piecewise_linear(2.0)};
}

struct ScanConfig {
  std::vector<LogFamily> families = default_scan_families();
  std::vector<std::size_t> dims = {2, 4, 16, 64};
  std::size_t trials = 20000;
  std::uint64_t seed = kDefaultSeed;
  std::vector<ScanMode> modes = {ScanMode::uniform, ScanMode::sparse,
                                 ScanMode::neighbor, ScanMode::hill_climb};
  /// Neighbor pairs sit at ||p-q||_1 = 10^-e, e uniform in this range.
  int min_tv_exponent = 1;
  int max_tv_exponent = 6;
  std::vector<double> epsilons = {0.1, 0.5, 1.0};
  int hill_climb_steps = 200;
  unsigned threads = 1;
  BoundOptions bound_options{};
};

/// Inputs of one trial, enough to replay any check.
struct TrialInputs {
  std::size_t family_index = 0;
  Pdf p = Pdf::uniform(1);
  Pdf q = Pdf::uniform(1);
  Pdf r = Pdf::uniform(1);
  double lambda = 0.0;
  double mu = 0.0;
  double epsilon = 1.0;
};

struct Witness {
  std::uint64_t trial;
  LogFamily family;
  TrialInputs inputs;
  BoundReport report;
};

struct BoundTally {
  BoundId bound_id = BoundId::cont1;
  std::size_t evaluated = 0;
  std::size_t skipped_support = 0;
  std::size_t not_applicable = 0;
  std::size_t violations = 0;
  std::optional<double> worst_ratio;
  std::optional<Witness> witness;
  std::optional<Witness> first_violation;
};

struct ScanReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<BoundTally> per_bound;
  std::size_t violations = 0;
  std::optional<double> worst_ratio;
  std::optional<BoundId> worst_bound;

  const BoundTally& tally(BoundId id) const {
    return per_bound[static_cast<std::size_t>(id)];
  }
  const std::optional<Witness>& witness() const {
    static const std::optional<Witness> none;
    return worst_bound ? tally(*worst_bound).witness : none;
  }
  /// No violated check and every ratio within 1 + ratio_tol.
  bool ok(double ratio_tol = 1e-9) const {
    return violations == 0 && (!worst_ratio || *worst_ratio <= 1.0 + ratio_tol);
  }
};

/// Runs one check on one set of trial inputs; throws what the check throws.
inline BoundReport evaluate_bound(BoundId id, const LogFamily& fam,
                                  const TrialInputs& in,
                                  const BoundOptions& opts = {}) {
  switch (id) {
    case BoundId::cont1: return check_cont1(fam, in.p, in.q, opts);
    case BoundId::relent_I: return check_relent_i(fam, in.p, in.q, in.r, opts);
    case BoundId::relent_D: return check_relent_d(fam, in.p, in.q, in.r, opts);
    case BoundId::improved: return check_improved(fam, in.p, in.q, opts);
    case BoundId::cont2: return check_cont2(fam, in.p, in.q, opts);
    case BoundId::lesche3: return check_lesche3(fam, in.p, in.q, opts);
    case BoundId::lesche4: return check_lesche4(fam, in.p, in.q, opts);
    case BoundId::fannes: return check_fannes(fam, in.p, in.q, opts);
    case BoundId::lb: return check_lb(fam, in.p, in.q, opts);
    case BoundId::condition1_segment:
      return check_condition1_segment(fam, in.p, in.q, in.lambda, in.mu,
                                      in.epsilon, opts);
  }
  throw Error("unknown bound");
}

/// Whether a bound is defined for the family at all.
inline bool bound_applies(BoundId id, const LogFamily& fam) {
  switch (id) {
    case BoundId::lesche3: return fam.kind() == FamilyKind::tsallis;
    case BoundId::lesche4:
    case BoundId::fannes: return fam.kind() == FamilyKind::shannon;
    default: return true;
  }
}

namespace detail {

enum class Outcome { ok, support, not_applicable };

struct Attempt {
  Outcome outcome;
  std::optional<BoundReport> report;
};

inline Attempt try_bound(BoundId id, const LogFamily& fam, const TrialInputs& in,
                         const BoundOptions& opts) {
  if (!bound_applies(id, fam)) return {Outcome::not_applicable, std::nullopt};
  try {
    return {Outcome::ok, evaluate_bound(id, fam, in, opts)};
  } catch (const SupportError&) {
    return {Outcome::support, std::nullopt};
  } catch (const RangeError&) {
    return {Outcome::not_applicable, std::nullopt};
  } catch (const IdenticalPdfs&) {
    return {Outcome::not_applicable, std::nullopt};
  }
}

/// Keeps |lambda - mu| ||p-q||_1 within delta after p or q moved.
inline void fit_mu(TrialInputs& in, double delta) {
  const double tv = tv_norm(in.p, in.q);
  if (tv == 0.0) return;
  const double span = std::min(1.0, delta / tv * (1.0 - 1e-12));
  in.mu = std::clamp(in.lambda + std::clamp(in.mu - in.lambda, -span, span),
                     0.0, 1.0);
}

class TrialRunner {
 public:
  explicit TrialRunner(const ScanConfig& config) : config_(config) {
    for (const auto& fam : config_.families) {
      std::vector<std::optional<double>> row;
      for (double eps : config_.epsilons) {
        try {
          row.push_back(condition1_delta(fam, eps));
        } catch (const InfeasibleEpsilon&) {
          row.push_back(std::nullopt);
        }
      }
      deltas_.push_back(std::move(row));
    }
  }

  void run(std::uint64_t trial, std::vector<BoundTally>& tallies) const {
    const std::size_t nf = config_.families.size();
    const std::size_t nd = config_.dims.size();
    const std::size_t nm = config_.modes.size();
    const std::size_t fi = trial % nf;
    const std::size_t n = config_.dims[(trial / nf) % nd];
    const ScanMode mode = config_.modes[(trial / (nf * nd)) % nm];
    const LogFamily& fam = config_.families[fi];

    SimplexSampler sampler{SplitMix64::split(config_.seed, trial)};
    SplitMix64& rng = sampler.rng();
    TrialInputs in;
    in.family_index = fi;
    switch (mode) {
      case ScanMode::uniform:
        in.p = sampler.uniform(n);
        in.q = sampler.uniform(n);
        break;
      case ScanMode::sparse:
        in.p = sampler.sparse(n);
        in.q = rng.uniform() < 0.5 ? sampler.sparse(n) : sampler.uniform(n);
        break;
      case ScanMode::neighbor:
      case ScanMode::hill_climb: {
        in.p = rng.uniform() < 0.5 ? sampler.uniform(n) : sampler.sparse(n);
        const int lo = config_.min_tv_exponent;
        const int hi = mode == ScanMode::neighbor
                           ? config_.max_tv_exponent
                           : std::min(config_.max_tv_exponent, lo + 2);
        const int e = lo + static_cast<int>(
                               rng.below(static_cast<std::size_t>(hi - lo + 1)));
        in.q = sampler.neighbor(in.p, std::pow(10.0, -e));
        break;
      }
    }
    in.r = rng.uniform() < 0.25 ? sampler.sparse(n) : sampler.uniform(n);
    const std::size_t ei = rng.below(config_.epsilons.size());
    in.epsilon = config_.epsilons[ei];
    in.lambda = rng.uniform();
    const double offset = 2.0 * rng.uniform() - 1.0;
    const std::optional<double> delta = deltas_[fi][ei];
    if (delta) {
      const double tv = tv_norm(in.p, in.q);
      const double span = tv > 0.0 ? std::min(1.0, *delta / tv * (1.0 - 1e-12)) : 1.0;
      in.mu = std::clamp(in.lambda + offset * span, 0.0, 1.0);
    } else {
      in.mu = in.lambda;
    }

    if (mode == ScanMode::hill_climb) climb(fam, in, delta, rng);
    const bool unbalanced = one_signed_difference(in.p, in.q);

    for (BoundId id : kAllBounds) {
      BoundTally& tally = tallies[static_cast<std::size_t>(id)];
      if (unbalanced || (id == BoundId::condition1_segment && !delta)) {
        ++tally.not_applicable;
        continue;
      }
      const Attempt a = try_bound(id, fam, in, config_.bound_options);
      switch (a.outcome) {
        case Outcome::support: ++tally.skipped_support; continue;
        case Outcome::not_applicable: ++tally.not_applicable; continue;
        case Outcome::ok: break;
      }
      ++tally.evaluated;
      const BoundReport& rep = *a.report;
      if (!rep.holds) {
        ++tally.violations;
        if (!tally.first_violation) tally.first_violation = Witness{trial, fam, in, rep};
      }
      if (rep.ratio && (!tally.worst_ratio || *rep.ratio > *tally.worst_ratio)) {
        tally.worst_ratio = rep.ratio;
        tally.witness = Witness{trial, fam, in, rep};
      }
    }
  }

 private:
  void climb(const LogFamily& fam, TrialInputs& in, std::optional<double> delta,
             SplitMix64& rng) const {
    std::vector<BoundId> targets;
    for (BoundId id : kAllBounds) {
      if (id == BoundId::lb || !bound_applies(id, fam)) continue;
      if (id == BoundId::condition1_segment && !delta) continue;
      targets.push_back(id);
    }
    const BoundId target = targets[rng.below(targets.size())];
    auto ratio_of = [&](const TrialInputs& x) {
      const Attempt a = try_bound(target, fam, x, config_.bound_options);
      if (a.outcome != Outcome::ok || !a.report->ratio) {
        return -std::numeric_limits<double>::infinity();
      }
      return *a.report->ratio;
    };
    double best = ratio_of(in);
    const std::size_t n = in.p.size();
    if (n < 2) return;
    double step = 0.5;
    int rejections = 0;
    for (int it = 0; it < config_.hill_climb_steps; ++it) {
      const bool move_q = rng.below(2) == 1;
      const std::size_t from = rng.below(n);
      std::size_t to = rng.below(n - 1);
      if (to >= from) ++to;
      const Pdf& src = move_q ? in.q : in.p;
      const double amount = step * src[from];
      const double moved = (src[to] + amount) - src[to];
      bool accepted = false;
      if (moved > 0.0 && src[from] - (src[from] - moved) == moved) {
        std::vector<double> w = src.vector();
        w[from] -= moved;
        w[to] += moved;
        TrialInputs cand = in;
        (move_q ? cand.q : cand.p) = Pdf::validate(std::move(w));
        if (delta) fit_mu(cand, *delta);
        const double r = one_signed_difference(cand.p, cand.q)
                             ? -std::numeric_limits<double>::infinity()
                             : ratio_of(cand);
        if (r > best) {
          best = r;
          in = std::move(cand);
          accepted = true;
        }
      }
      if (accepted) {
        rejections = 0;
      } else if (++rejections >= 10) {
        step *= 0.5;
        rejections = 0;
      }
    }
  }

  const ScanConfig& config_;
  std::vector<std::vector<std::optional<double>>> deltas_;
};

inline std::vector<BoundTally> empty_tallies() {
  std::vector<BoundTally> t;
  for (BoundId id : kAllBounds) {
    BoundTally tally;
    tally.bound_id = id;
    t.push_back(std::move(tally));
  }
  return t;
}

/// Folds `later` (covering later trials) into `into`; ties keep the earlier
/// witness so the merge order matches sequential execution.
inline void merge_tallies(std::vector<BoundTally>& into,
                          const std::vector<BoundTally>& later) {
  for (std::size_t b = 0; b < into.size(); ++b) {
    BoundTally& a = into[b];
    const BoundTally& c = later[b];
    a.evaluated += c.evaluated;
    a.skipped_support += c.skipped_support;
    a.not_applicable += c.not_applicable;
    a.violations += c.violations;
    if (!a.first_violation && c.first_violation) a.first_violation = c.first_violation;
    if (c.worst_ratio && (!a.worst_ratio || *c.worst_ratio > *a.worst_ratio)) {
      a.worst_ratio = c.worst_ratio;
      a.witness = c.witness;
    }
  }
}

}  // namespace detail

inline ScanReport stability_scan(const ScanConfig& config) {
  if (config.trials < 1) throw DomainError("scan needs trials >= 1");
  if (config.families.empty() || config.dims.empty() || config.modes.empty() ||
      config.epsilons.empty()) {
    throw DomainError("scan needs at least one family, dim, mode and epsilon");
  }
  for (std::size_t n : config.dims) {
    if (n < 1) throw DomainError("scan dims must be >= 1");
  }
  if (config.min_tv_exponent < 0 ||
      config.max_tv_exponent < config.min_tv_exponent) {
    throw DomainError("invalid tv exponent range");
  }
  const detail::TrialRunner runner(config);
  const unsigned workers = std::max<unsigned>(
      1, std::min<unsigned>(config.threads,
                            static_cast<unsigned>(std::min<std::size_t>(
                                config.trials, 1024))));
  std::vector<std::vector<BoundTally>> partial(workers, detail::empty_tallies());
  auto work = [&](unsigned w) {
    const std::size_t begin = config.trials * w / workers;
    const std::size_t end = config.trials * (w + 1) / workers;
    for (std::size_t t = begin; t < end; ++t) runner.run(t, partial[w]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  ScanReport report;
  report.trials = config.trials;
  report.seed = config.seed;
  report.per_bound = std::move(partial[0]);
  for (unsigned w = 1; w < workers; ++w) detail::merge_tallies(report.per_bound, partial[w]);
  for (const BoundTally& t : report.per_bound) {
    report.violations += t.violations;
    if (t.worst_ratio && (!report.worst_ratio || *t.worst_ratio > *report.worst_ratio)) {
      report.worst_ratio = t.worst_ratio;
      report.worst_bound = t.bound_id;
    }
  }
  return report;
}

}  // namespace deformed
