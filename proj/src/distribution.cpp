#include "anderson/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "anderson/error.hpp"

namespace anderson {

SiteDistribution::SiteDistribution(std::vector<Atom> atoms, std::vector<UniformPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  build();
}

SiteDistribution SiteDistribution::bernoulli(double q, double value) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("Bernoulli parameter must lie in [0, 1]");
  std::vector<Atom> a;
  if (q < 1.0) a.push_back({0.0, 1.0 - q});
  if (q > 0.0) a.push_back({value, q});
  return SiteDistribution(a, {});
}

SiteDistribution SiteDistribution::uniform(double lo, double hi) {
  return SiteDistribution({}, {{lo, hi, 1.0}});
}

SiteDistribution SiteDistribution::point(double c) { return SiteDistribution({{c, 1.0}}, {}); }

void SiteDistribution::build() {
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.value) || !(a.prob >= 0.0)) throw DomainError("atom needs a finite value and probability >= 0");
    total += a.prob;
  }
  for (const auto& p : pieces_) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
      throw DomainError("uniform piece needs finite lo < hi");
    if (!(p.weight >= 0.0)) throw DomainError("uniform piece weight must be >= 0");
    total += p.weight;
  }
  if (atoms_.empty() && pieces_.empty()) throw DomainError("distribution has no mass");
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("distribution weights must sum to 1");

  breaks_.clear();
  for (const auto& a : atoms_)
    if (a.prob > 0.0) breaks_.push_back(a.value);
  for (const auto& p : pieces_)
    if (p.weight > 0.0) {
      breaks_.push_back(p.lo);
      breaks_.push_back(p.hi);
    }
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());

  segments_.clear();
  double u = 0.0;
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    const double b = breaks_[i];
    double mass = 0.0;
    for (const auto& a : atoms_)
      if (a.value == b) mass += a.prob;
    if (mass > 0.0) {
      segments_.push_back({u, u + mass, b, b});
      u += mass;
    }
    if (i + 1 < breaks_.size()) {
      const double c = breaks_[i + 1];
      double m = 0.0;
      for (const auto& p : pieces_)
        if (p.weight > 0.0 && p.lo <= b && p.hi >= c) m += p.weight * (c - b) / (p.hi - p.lo);
      if (m > 0.0) {
        segments_.push_back({u, u + m, b, c});
        u += m;
      }
    }
  }
  segments_.back().u1 = 1.0;
}

double SiteDistribution::cdf(double x) const {
  double f = 0.0;
  for (const auto& a : atoms_)
    if (a.value <= x) f += a.prob;
  for (const auto& p : pieces_) f += p.weight * std::clamp((x - p.lo) / (p.hi - p.lo), 0.0, 1.0);
  return std::min(f, 1.0);
}

double SiteDistribution::cdf_left(double x) const {
  double f = 0.0;
  for (const auto& a : atoms_)
    if (a.value < x) f += a.prob;
  for (const auto& p : pieces_) f += p.weight * std::clamp((x - p.lo) / (p.hi - p.lo), 0.0, 1.0);
  return std::min(f, 1.0);
}

namespace {
double eval_segment(const QuantileSegment& s, double u) {
  if (s.x0 == s.x1) return s.x0;
  const double t = std::clamp((u - s.u0) / (s.u1 - s.u0), 0.0, 1.0);
  return s.x0 + (s.x1 - s.x0) * t;
}
}  // namespace

double SiteDistribution::quantile(double u) const {
  if (u <= 0.0) return segments_.front().x0;
  auto it = std::lower_bound(segments_.begin(), segments_.end(), u,
                             [](const QuantileSegment& s, double v) { return s.u1 < v; });
  if (it == segments_.end()) return segments_.back().x1;
  return eval_segment(*it, u);
}

double SiteDistribution::quantile_left_limit(double u) const { return quantile(u); }

double SiteDistribution::quantile_right_limit(double u) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), u,
                             [](double v, const QuantileSegment& s) { return v < s.u1; });
  if (it == segments_.end()) return segments_.back().x1;
  return eval_segment(*it, u);
}

double SiteDistribution::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.prob * a.value;
  for (const auto& p : pieces_) m += p.weight * 0.5 * (p.lo + p.hi);
  return m;
}

double SiteDistribution::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (const auto& a : atoms_) v += a.prob * (a.value - mu) * (a.value - mu);
  for (const auto& p : pieces_) {
    const double a = p.lo - mu, b = p.hi - mu;
    v += p.weight * (b * b * b - a * a * a) / (3.0 * (b - a));
  }
  return v;
}

}  // namespace anderson
