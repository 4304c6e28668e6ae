#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "anderson/ensembles.hpp"
#include "anderson/lattice.hpp"
#include "anderson/operators.hpp"

namespace anderson {

// Six dyadic scales L0 > ... > L5 with L_j^{1-2 delta} >= L_{j+1} >= L_j^{1-eps/2}.
struct WegnerScales {
  std::array<double, 6> L{};
  double epsilon = 0.0;
  double delta = 0.0;
  double C_shift = 0.0;

  WegnerScales(std::array<double, 6> scales, double epsilon, double delta, double C_shift);
  // log s_i = -L1 + (L2 - L4 + C) i
  double log_s(int i) const;
};

// Indices are 1-based into the decreasing eigenvalue list; E_0 = +inf and
// E_{dim+1} = -inf.
struct AnnulusEvent {
  int k1 = 2;
  int k2 = 2;
  int ell = 0;
  double s_ell = 0.0;
  double s_next = 0.0;  // s_{ell+1}

  AnnulusEvent(int k1, int k2, int ell, double s_ell, double s_next);
  static AnnulusEvent from_scales(const WegnerScales& scales, int k1, int k2, int ell);
};

bool annulus_event_holds(const std::vector<double>& eigs_decreasing, double Ebar, const AnnulusEvent& ev);

// Union of the events over 1 < k1 <= k2 < dim, evaluated directly: the annulus
// holds no eigenvalue, and the inner band and both outer components each hold one.
bool annulus_predicate(const std::vector<double>& eigs_decreasing, double Ebar, double s_ell, double s_next);

// Eigenvalue push under a rank-one coordinate projection.
struct PushReport {
  int failed_hypothesis = 0;  // 0 when hypotheses 1-5 hold, else the first failing one
  int i = 0, j = 0;           // 1-based indices witnessing hypotheses 3 and 4
  int count_before = 0;       // tr 1_[r1, inf)(A)
  int count_after = 0;        // tr 1_[r1, inf)(A + eta e_k e_k^T)
  bool pushed = false;
  bool hypotheses_ok() const { return failed_hypothesis == 0; }
};

constexpr double kPushConstant = 1.0 / 16.0;

PushReport eigen_push_check(const Eigen::MatrixXd& A, const std::array<double, 5>& r, int k, double eta,
                            double c = kPushConstant);

struct PushInstance {
  Eigen::MatrixXd A;
  std::array<double, 5> r{};
  int k = 0;
};

// Random symmetric matrix built to satisfy the push hypotheses: prescribed
// spectrum, random orthogonal basis reflected so that row k hits a target vector.
PushInstance random_push_instance(int n, std::uint64_t seed, double c = kPushConstant);

// Eigenvalue branch E_k(s) of H(s) = H_start + s (V_end - V_start), k 1-based in
// decreasing order, with Feynman-Hellmann derivatives checked against centred differences.
struct FhNode {
  double s = 0.0;
  double E = 0.0;
  double fh = 0.0;  // <u, (V_end - V_start) u>
  double fd = 0.0;  // Richardson-extrapolated centred difference
  double rel_error = 0.0;
  double gap = 0.0;  // distance to the neighbouring eigenvalues
  bool simple = true;
};

struct FhPathReport {
  std::vector<FhNode> nodes;
  double max_rel_error = 0.0;  // over simple nodes
  std::size_t crossings = 0;
};

constexpr double kCrossingGap = 1e-9;

FhPathReport fh_path(const Hamiltonian& H_start, const Hamiltonian& H_end, int k, int steps,
                     bool throw_on_crossing = true);

struct MassSets {
  std::vector<Site> S1, S2;
};

// S1 = off F' with xi_n = 1 - i; S2 = off F' with xi_n = i and |u(n)| >= threshold.
MassSets mass_sets(const Cube& cube, const Eigen::VectorXd& u, const std::set<Site>& xi, const std::set<Site>& excluded,
                   int i, double threshold);

// |{n off excluded : |u(n)| >= threshold_factor ||u||_2}|
std::size_t uc_mass_count(const Eigen::VectorXd& u, const Cube& cube, double threshold_factor,
                          const std::set<Site>& excluded = {});

// A site in layer k or k-1 of the cone with |u(site)| >= (K + 11)^{-k} |u(apex)|.
// Throws DomainError when layer k misses the cube and FindingError when no site qualifies.
Site cone_descent(const Eigen::VectorXd& u, double K, const Site& apex, int axis, int sign, int k, const Cube& cube);

struct ProportionEstimate {
  std::size_t hits = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  double lo = 0.0, hi = 0.0;  // Wilson 95% interval
};

ProportionEstimate wilson_interval(std::size_t hits, std::size_t trials);

// P[||(H - Ebar)^{-1}|| > exp(log_threshold)] with trial t drawn from stream t + 1.
ProportionEstimate wegner_mc(const PotentialField& field, const Cube& cube, double Ebar, double log_threshold,
                             std::size_t trials, std::uint64_t seed);

struct RobustnessReport {
  bool good = false;
  std::size_t probes_run = 0;  // including the sample itself
  std::size_t first_failure = 0;  // 0 the sample, j the j-th probe
};

// The sample and `probes` re-draws off the observed set must all satisfy
// |(H - Ebar)^{-1}(x,y)| <= exp(log_prefactor - m |x - y|). Probe j uses stream
// j + 1, so the passing event shrinks as probes grow.
RobustnessReport good_robustness_probe(const PotentialField& field, const Cube& cube, double Ebar,
                                       const std::set<Site>& observed, std::size_t probes, std::uint64_t seed,
                                       double log_prefactor, double m);

}  // namespace anderson
