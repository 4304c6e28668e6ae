#include "anderson/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anderson/rng.hpp"

namespace anderson {

const char* rule_name(AssignmentRule r) {
  switch (r) {
    case AssignmentRule::iid: return "iid";
    case AssignmentRule::checkerboard: return "checkerboard";
    case AssignmentRule::interface: return "interface";
    case AssignmentRule::explicit_map: return "explicit";
  }
  return "?";
}

AssignmentRule rule_from_name(const std::string& name) {
  if (name == "iid") return AssignmentRule::iid;
  if (name == "checkerboard") return AssignmentRule::checkerboard;
  if (name == "interface") return AssignmentRule::interface;
  if (name == "explicit") return AssignmentRule::explicit_map;
  throw ConfigError("unknown assignment rule '" + name + "'");
}

namespace {

std::vector<std::string> required_roles(AssignmentRule r) {
  switch (r) {
    case AssignmentRule::iid: return {"all"};
    case AssignmentRule::checkerboard: return {"even", "odd"};
    case AssignmentRule::interface: return {"left", "right"};
    case AssignmentRule::explicit_map: return {"default"};
  }
  return {};
}

}  // namespace

PotentialField::PotentialField(AssignmentRule rule, std::map<std::string, SiteDistribution> laws,
                               double M, double sigma2_min,
                               std::unordered_map<Site, std::string, SiteHash> site_table, bool certify)
    : rule_(rule), laws_(std::move(laws)), M_(M), sigma2_min_(sigma2_min), site_table_(std::move(site_table)),
      certified_(certify) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw DomainError("M must be finite and non-negative");
  if (!(sigma2_min > 0.0)) throw DomainError("sigma2_min must be positive");
  for (const auto& role : required_roles(rule_))
    if (!laws_.count(role)) throw DomainError(std::string("rule '") + rule_name(rule_) + "' needs a law named '" + role + "'");
  for (const auto& [site, role] : site_table_)
    if (!laws_.count(role)) throw DomainError("site " + to_string(site) + " refers to unknown law '" + role + "'");
  for (const auto& [role, law] : laws_) {
    if (law.support_min() < 0.0 || law.support_max() > M_)
      throw DomainError("law '" + role + "' has support outside [0, M]");
    if (certified_ && law.variance() < sigma2_min_ * (1.0 - 1e-12))
      throw DomainError("law '" + role + "' has variance below sigma2_min");
  }
}

PotentialField PotentialField::uncertified(AssignmentRule rule, std::map<std::string, SiteDistribution> laws,
                                           double M, std::unordered_map<Site, std::string, SiteHash> site_table) {
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& [role, law] : laws) floor = std::min(floor, law.variance());
  // the stored floor is the smallest variance present, which may be zero
  PotentialField f(rule, std::move(laws), M, std::numeric_limits<double>::min(), std::move(site_table), false);
  f.sigma2_min_ = floor;
  return f;
}

PotentialField PotentialField::iid(const SiteDistribution& law, double M, double sigma2_min) {
  return PotentialField(AssignmentRule::iid, {{"all", law}}, M, sigma2_min);
}

const std::string& PotentialField::role_at(const Site& n) const {
  static const std::string all = "all", even = "even", odd = "odd", left = "left", right = "right",
                           fallback = "default";
  switch (rule_) {
    case AssignmentRule::iid: return all;
    case AssignmentRule::checkerboard: return ((n[0] + n[1] + n[2]) % 2 == 0) ? even : odd;
    case AssignmentRule::interface: return n[0] < 0 ? left : right;
    case AssignmentRule::explicit_map: {
      auto it = site_table_.find(n);
      return it == site_table_.end() ? fallback : it->second;
    }
  }
  return all;
}

std::vector<double> sample_potential(const PotentialField& field, const Cube& cube,
                                     std::uint64_t seed, std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  std::vector<double> v(cube.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Site n = cube.site_at(i);
    v[i] = field.law_at(n).quantile(rng.uniform(n));
  }
  return v;
}

double variance_certificate(const SiteDistribution& dist) { return dist.variance(); }

double anti_concentration_bound(double sigma, double M) {
  const double s4 = std::pow(sigma, 4), m4 = std::pow(M, 4);
  return 1.0 - (9.0 / 16.0) * s4 / (s4 + m4);
}

double anti_concentration_sup(const SiteDistribution& dist, double sigma, double M) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (dist.variance() < sigma * sigma * (1.0 - 1e-12)) throw DomainError("variance below sigma^2");
  if (dist.support_min() < 0.0 || dist.support_max() > M) throw DomainError("support outside [0, M]");
  // m(s) = P[s < X < s + sigma] is piecewise linear in s with kinks where s or
  // s + sigma meets a breakpoint; check both one-sided limits there
  double best = 0.0;
  for (double b : dist.breakpoints()) {
    for (double s : {b, b - sigma}) {
      const double at = dist.cdf_left(s + sigma) - dist.cdf(s);
      const double right = dist.cdf(s + sigma) - dist.cdf(s);
      const double left = dist.cdf_left(s + sigma) - dist.cdf_left(s);
      best = std::max({best, at, right, left});
    }
  }
  return std::min(best, 1.0);
}

double BernoulliDecomposition::Y(double t) const { return source.quantile(t * split); }

double BernoulliDecomposition::Z(double t) const {
  return source.quantile(split + t * (1.0 - split)) - Y(t);
}

namespace {

constexpr double kTieTol = 1e-13;

// Index k such that the boundary between quantile segments k and k+1 sits at u, or -1.
int boundary_at(const std::vector<QuantileSegment>& seg, double u) {
  for (std::size_t k = 0; k + 1 < seg.size(); ++k)
    if (std::abs(seg[k].u1 - u) <= kTieTol) return static_cast<int>(k);
  return -1;
}

struct Limits {
  double minus, plus;
};

Limits limits_at(const SiteDistribution& d, double u) {
  const auto& seg = d.quantile_segments();
  const int k = boundary_at(seg, u);
  if (k >= 0) return {seg[static_cast<std::size_t>(k)].x1, seg[static_cast<std::size_t>(k) + 1].x0};
  const double q = d.quantile(u);
  return {q, q};
}

}  // namespace

double decomposition_gap(const SiteDistribution& dist, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  const double split = 1.0 - p;
  const auto& seg = dist.quantile_segments();
  // t values where Y(t) = q(t*split) or S(t) = q(split + t*p) crosses a segment boundary
  std::vector<double> ts;
  for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
    const double u = seg[k].u1;
    if (u < split - kTieTol) ts.push_back(u / split);
    if (u > split + kTieTol) ts.push_back((u - split) / p);
  }
  std::sort(ts.begin(), ts.end());

  // t -> 0+ and t -> 1-
  double iota = limits_at(dist, split).plus - seg.front().x0;
  iota = std::min(iota, seg.back().x1 - limits_at(dist, split).minus);
  for (double t : ts) {
    if (!(t > 0.0 && t < 1.0)) continue;
    const Limits y = limits_at(dist, t * split);
    const Limits s = limits_at(dist, split + t * p);
    iota = std::min({iota, s.minus - y.minus, s.plus - y.plus});
  }
  return iota;
}

BernoulliDecomposition bernoulli_decompose(const SiteDistribution& dist, double p) {
  const double iota = decomposition_gap(dist, p);
  if (!(iota > 0.0))
    throw GapFailure("gap failure: inf Z = " + std::to_string(iota) + " at p = " + std::to_string(p), iota);
  return {dist, 1.0 - p, p, iota};
}

std::vector<double> decomposition_p_candidates(const SiteDistribution& dist, double M, double sigma2) {
  std::vector<double> ps;
  for (int j = 1; j <= 99; ++j) ps.push_back(j / 100.0);
  const double sigma = std::sqrt(sigma2);
  if (M >= 1.0 && sigma2 <= 1e-8 * M * M) {
    const double edge = std::pow(sigma, 5) / (2.0 * std::pow(M, 4));
    ps.push_back(edge);
    ps.push_back(1.0 - edge);
  }
  // splitting exactly at a jump of the quantile is the only way an atomic law gets a gap
  const auto& seg = dist.quantile_segments();
  for (std::size_t k = 0; k + 1 < seg.size(); ++k) ps.push_back(1.0 - seg[k].u1);
  std::vector<double> out;
  for (double p : ps)
    if (p > 0.0 && p < 1.0) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CertifiedDecomposition decompose_with_certificate(const SiteDistribution& dist, double M, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  if (dist.variance() < sigma2 * (1.0 - 1e-12)) throw DomainError("variance below sigma2");
  if (dist.support_min() < 0.0 || dist.support_max() > M) throw DomainError("support outside [0, M]");

  CertifiedDecomposition out;
  const double sigma = std::sqrt(sigma2);
  out.in_regime = M >= 1.0 && sigma2 <= 1e-8 * M * M;
  if (M > 0.0) {
    out.p_floor = std::pow(sigma, 5) / (2.0 * std::pow(M, 4));
    out.iota_floor = std::pow(sigma, 10) / (4.0 * std::pow(M, 9));
  }

  const auto candidates = decomposition_p_candidates(dist, M, sigma2);
  out.candidates_tried = candidates.size();
  double best_iota = 0.0, best_p = -1.0;
  bool best_in_range = false;
  for (double p : candidates) {
    const double iota = decomposition_gap(dist, p);
    if (!(iota > 0.0)) continue;
    const bool in_range = !out.in_regime || (std::min(p, 1.0 - p) >= out.p_floor);
    auto better = [&]() {
      if (best_p < 0.0) return true;
      if (in_range != best_in_range) return in_range;
      if (iota > best_iota * (1.0 + 1e-14)) return true;
      if (iota < best_iota * (1.0 - 1e-14)) return false;
      return std::min(p, 1.0 - p) > std::min(best_p, 1.0 - best_p);
    };
    if (better()) {
      best_iota = iota;
      best_p = p;
      best_in_range = in_range;
    }
  }
  if (best_p < 0.0) {
    out.failure = "no candidate p yields a positive gap";
    return out;
  }
  out.ok = true;
  out.decomposition = {dist, 1.0 - best_p, best_p, best_iota};
  if (out.in_regime) {
    out.p_bound_ok = std::min(best_p, 1.0 - best_p) >= out.p_floor;
    out.iota_bound_ok = best_iota >= out.iota_floor;
    if (!out.p_bound_ok) out.failure = "p outside [sigma^5/(2M^4), 1 - sigma^5/(2M^4)]";
    else if (!out.iota_bound_ok) out.failure = "iota below sigma^10/(4M^9)";
  }
  return out;
}

namespace {

// law of Y(t) + xi Z(t): with prob 1-p the quantile on (0, split), with prob p on (split, 1)
double mixture_cdf(const BernoulliDecomposition& d, double F) {
  const double s = d.split;
  const double lower = std::min(F, s) / s;
  const double upper = std::max(F - s, 0.0) / (1.0 - s);
  return (1.0 - d.p) * lower + d.p * upper;
}

}  // namespace

DecompositionDistance verify_decomposition(const BernoulliDecomposition& decomp, const SiteDistribution& dist) {
  DecompositionDistance out;
  out.atomic = dist.is_atomic() && decomp.source.is_atomic();
  const auto& src = decomp.source;
  if (out.atomic) {
    std::vector<double> xs = dist.breakpoints();
    xs.insert(xs.end(), src.breakpoints().begin(), src.breakpoints().end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double tv = 0.0;
    for (double x : xs) {
      const double mix = mixture_cdf(decomp, src.cdf(x)) - mixture_cdf(decomp, src.cdf_left(x));
      const double ref = dist.cdf(x) - dist.cdf_left(x);
      tv += std::abs(mix - ref);
    }
    out.distance = 0.5 * tv;
    return out;
  }
  const double lo = std::min(dist.support_min(), src.support_min());
  const double hi = std::max(dist.support_max(), src.support_max());
  std::vector<double> xs = dist.breakpoints();
  xs.insert(xs.end(), src.breakpoints().begin(), src.breakpoints().end());
  constexpr int kGrid = 10000;
  for (int i = 0; i < kGrid; ++i) xs.push_back(lo + (hi - lo) * i / (kGrid - 1));
  double sup = 0.0;
  for (double x : xs) {
    sup = std::max(sup, std::abs(mixture_cdf(decomp, src.cdf(x)) - dist.cdf(x)));
    sup = std::max(sup, std::abs(mixture_cdf(decomp, src.cdf_left(x)) - dist.cdf_left(x)));
  }
  out.distance = sup;
  return out;
}

}  // namespace anderson
