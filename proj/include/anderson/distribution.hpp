#pragma once

#include <vector>

namespace anderson {

struct Atom {
  double value;
  double prob;
};

struct UniformPiece {
  double lo;
  double hi;
  double weight;
};

// One segment of the left-continuous quantile: on (u0, u1] it is linear from x0 to x1.
struct QuantileSegment {
  double u0, u1;
  double x0, x1;
};

// Bounded law made of point masses and uniform pieces. Immutable.
class SiteDistribution {
 public:
  SiteDistribution() = default;
  SiteDistribution(std::vector<Atom> atoms, std::vector<UniformPiece> pieces);

  static SiteDistribution bernoulli(double q, double value = 1.0);
  static SiteDistribution uniform(double lo, double hi);
  static SiteDistribution point(double c);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<UniformPiece>& pieces() const { return pieces_; }
  bool is_atomic() const { return pieces_.empty(); }

  double support_min() const { return breaks_.front(); }
  double support_max() const { return breaks_.back(); }

  double cdf(double x) const;       // P[X <= x]
  double cdf_left(double x) const;  // P[X < x]
  // inf{x : F(x) >= u}, u in (0, 1]
  double quantile(double u) const;
  double quantile_left_limit(double u) const;   // lim q(v), v -> u-
  double quantile_right_limit(double u) const;  // lim q(v), v -> u+

  double mean() const;
  double variance() const;

  // all atom positions and piece endpoints, sorted, deduplicated
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<QuantileSegment>& quantile_segments() const { return segments_; }

 private:
  void build();

  std::vector<Atom> atoms_;
  std::vector<UniformPiece> pieces_;
  std::vector<double> breaks_;
  std::vector<QuantileSegment> segments_;
};

}  // namespace anderson
