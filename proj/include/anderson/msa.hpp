#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "anderson/lattice.hpp"
#include "anderson/operators.hpp"

namespace anderson {

// Scales are handled through their base-2 exponents l_k = log2 L_k.

// Smallest l' with floor((1 - 6 eps) l') = l. DomainError when eps is outside
// (0, 1/12) or no such exponent exists.
int next_scale_exponent(int l, double epsilon);
std::int64_t next_scale(std::int64_t L, double epsilon);

bool floor_identity_holds(int l, int l_next, double epsilon);

// l0, next_scale_exponent(l0), ... with count entries.
std::vector<int> scale_exponents(int l0, double epsilon, std::size_t count);

struct DecaySchedule {
  std::vector<double> m;           // m_0 .. m_{n-1}
  double m_star = 0.0;             // m0 - sum over the listed scales of L_k^{-delta'}
  int first_floor_failure = -1;    // first k with m_k < L_k^{-delta}, -1 if none
  bool floor_ok() const { return first_floor_failure < 0; }
  bool m_star_positive() const { return m_star > 0.0; }
};

// m_k = m_{k-1} - L_{k-1}^{-delta'}. With strict set, a floor violation or a
// nonpositive limit throws DomainError naming the first failing k.
DecaySchedule decay_schedule(double m0, double delta_prime, double delta, const std::vector<int>& log2_L,
                             bool strict = false);

struct ScaleSchedule {
  double epsilon = 0.0, delta = 0.0, delta_prime = 0.0;
  bool ordering_ok = false;  // eps > delta' > delta > 0; recorded, not enforced
  std::vector<int> log2_L;
  std::vector<double> L;
  DecaySchedule decay;
  int first_identity_failure = -1;  // k with the floor identity failing between k and k+1
};

ScaleSchedule plan_schedule(double epsilon, double delta, double delta_prime, int l0, std::size_t count,
                            double m0 = 1.0);

// Re-verifies the floor identity and decay floor from the stored numbers.
bool schedule_identities_hold(const ScaleSchedule& s);

struct FinalParams {
  double kappa_star = 0.0;
  double eps_star = 0.0;
  double m_star = 0.0;
  double eps2_slack = 0.0;  // second-order terms are dropped unless a slack is given
  DecaySchedule decay;
};

// eps* = 0.75 eps, kappa* = (kappa - 49 eps - s eps^2) / (1 - 10 eps + s eps^2).
FinalParams final_params(double kappa, double epsilon, double m0, double delta_prime, double delta,
                         const std::vector<int>& log2_L, double eps2_slack = 0.0);

// exp(L^{1-eps*} - m* r) >= exp(L_k^{1-eps} - m_k r) for L_k <= L; log form.
bool assembly_bound_weaker(double L, double r, double L_k, double m_k, double epsilon, double eps_star,
                           double m_star);

// Seven scales l0 > ... > l6 with l_k^{1-nu'} >= l_{k+1}, and 0 < nu < nu'.
struct CombineScales {
  std::array<double, 7> ell{};
  double nu = 0.0;
  double nu_prime = 0.0;

  CombineScales(std::array<double, 7> ell, double nu, double nu_prime);
  // l0 = L, l5 = Lk, geometric in between, l6 = l5^{1-nu'}
  static CombineScales between(double L, double Lk, double nu, double nu_prime);
};

struct CombineReport {
  double m_tilde = 0.0;
  std::size_t subcubes = 0;
  std::size_t gate_violations = 0;     // subcube entries above exp(l6 - m |y-z|)
  std::size_t uncovered_sites = 0;     // sites lacking a subcube at distance >= witness_distance
  bool hypotheses_ok = false;
  bool asserted = false;               // implication evaluated (hypotheses held)
  DecayCheckReport target;             // against exp(l1 - m_tilde |x-y|)
  bool implication_holds() const { return asserted && target.violation_count == 0; }
};

// Subcube resolvents are those of H restricted to each member of the cover.
// Members must lie inside the target cube. Distances are Euclidean.
CombineReport combine_resolvents(const Hamiltonian& H, double Ebar, const std::vector<Cube>& cover,
                                 const CombineScales& scales, double m, double witness_distance);

// Same, with subcube reports supplied by the caller (one per cover member).
CombineReport combine_resolvents(const Hamiltonian& H, double Ebar, const std::vector<Cube>& cover,
                                 const std::vector<DecayCheckReport>& subcube_reports, const CombineScales& scales,
                                 double m, double witness_distance);

Hamiltonian restrict_to(const Hamiltonian& H, const Cube& sub);

}  // namespace anderson
