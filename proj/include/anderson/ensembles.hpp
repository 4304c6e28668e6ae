#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "anderson/distribution.hpp"
#include "anderson/error.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

enum class AssignmentRule { iid, checkerboard, interface, explicit_map };

const char* rule_name(AssignmentRule r);
AssignmentRule rule_from_name(const std::string& name);

// Independent, site-dependent laws. Role names per rule:
//   iid: "all"; checkerboard: "even", "odd" (parity of x+y+z);
//   interface: "left" (x < 0), "right" (x >= 0);
//   explicit_map: "default" plus any names referenced by the site table.
class PotentialField {
 public:
  PotentialField(AssignmentRule rule, std::map<std::string, SiteDistribution> laws, double M,
                 double sigma2_min,
                 std::unordered_map<Site, std::string, SiteHash> site_table = {}, bool certify = true);

  static PotentialField iid(const SiteDistribution& law, double M, double sigma2_min);
  // Skips the variance floor (support in [0, M] is still enforced); for
  // deterministic or degenerate test potentials.
  static PotentialField uncertified(AssignmentRule rule, std::map<std::string, SiteDistribution> laws, double M,
                                    std::unordered_map<Site, std::string, SiteHash> site_table = {});

  bool certified() const { return certified_; }

  AssignmentRule rule() const { return rule_; }
  const std::map<std::string, SiteDistribution>& laws() const { return laws_; }
  const std::unordered_map<Site, std::string, SiteHash>& site_table() const { return site_table_; }
  double M() const { return M_; }
  double sigma2_min() const { return sigma2_min_; }

  const std::string& role_at(const Site& n) const;
  const SiteDistribution& law_at(const Site& n) const { return laws_.at(role_at(n)); }

 private:
  AssignmentRule rule_;
  std::map<std::string, SiteDistribution> laws_;
  double M_;
  double sigma2_min_;
  std::unordered_map<Site, std::string, SiteHash> site_table_;
  bool certified_ = true;
};

// Values in cube index order. Each site draws from its own key (seed, stream, site),
// so a site's value does not depend on which cube contains it.
std::vector<double> sample_potential(const PotentialField& field, const Cube& cube,
                                     std::uint64_t seed, std::uint64_t stream = 0);

double variance_certificate(const SiteDistribution& dist);

// sup over open intervals of length sigma of P[X in I].
double anti_concentration_sup(const SiteDistribution& dist, double sigma, double M);
double anti_concentration_bound(double sigma, double M);

// X = Y(t) + xi Z(t) in law, t ~ U(0,1), xi ~ Ber(p).
struct BernoulliDecomposition {
  SiteDistribution source;
  double split = 0.5;  // 1 - p at construction time
  double p = 0.5;      // mixture weight used when re-assembling the law
  double iota = 0.0;

  double Y(double t) const;
  double Z(double t) const;
};

class GapFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

// inf over t in (0,1) of Z(t) for the quantile split at 1 - p, exact for piecewise laws.
double decomposition_gap(const SiteDistribution& dist, double p);

// Throws GapFailure when the gap is not positive.
BernoulliDecomposition bernoulli_decompose(const SiteDistribution& dist, double p);

struct CertifiedDecomposition {
  bool ok = false;
  BernoulliDecomposition decomposition;
  bool in_regime = false;  // M >= 1 and sigma2 <= 1e-8 M^2
  double p_floor = 0.0;    // sigma^5 / (2 M^4)
  double iota_floor = 0.0; // sigma^10 / (4 M^9)
  bool p_bound_ok = true;
  bool iota_bound_ok = true;
  std::size_t candidates_tried = 0;
  std::string failure;
};

std::vector<double> decomposition_p_candidates(const SiteDistribution& dist, double M, double sigma2);

CertifiedDecomposition decompose_with_certificate(const SiteDistribution& dist, double M, double sigma2);

struct DecompositionDistance {
  bool atomic = true;
  double distance = 0.0;  // total variation for atomic laws, CDF sup distance otherwise
};

DecompositionDistance verify_decomposition(const BernoulliDecomposition& decomp,
                                           const SiteDistribution& dist);

}  // namespace anderson
