#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "anderson/error.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

// H = -Delta + V restricted to a cube with Dirichlet truncation:
// diagonal 2d + V(n), off-diagonal -1 between l1-neighbours inside the cube.
class Hamiltonian {
 public:
  Hamiltonian(Cube cube, std::vector<double> potential, bool hopping = true);

  const Cube& cube() const { return cube_; }
  std::size_t dim() const { return potential_.size(); }
  const std::vector<double>& potential() const { return potential_; }
  bool hopping() const { return hopping_; }

  double diagonal(std::size_t i) const { return (hopping_ ? 2.0 * kDim : 0.0) + potential_[i]; }
  double potential_max() const;
  double potential_min() const;
  // Gershgorin upper bound on the operator norm
  double norm_bound() const;

  void apply(const double* x, double* y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  void apply_block(const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) const;

  Eigen::SparseMatrix<double> sparse(double shift = 0.0) const;
  Eigen::MatrixXd dense(double shift = 0.0) const;

  // FNV-1a over the potential bits and cube, for caching.
  std::uint64_t fingerprint() const;

 private:
  Cube cube_;
  std::vector<double> potential_;
  bool hopping_;
};

Hamiltonian assemble(const Cube& cube, const std::unordered_map<Site, double, SiteHash>& potential);
Hamiltonian assemble(const Cube& cube, const std::map<Site, double>& potential);
Hamiltonian assemble(const Cube& cube, std::vector<double> potential_in_index_order);

// Eigenvalues in decreasing order; vectors column-aligned with values.
struct EigenData {
  std::vector<double> values;
  Eigen::MatrixXd vectors;

  std::size_t count() const { return values.size(); }
};

constexpr std::size_t kDefaultDenseCap = 12167;  // 23^3

EigenData eigendecompose(const Hamiltonian& H, std::size_t dense_cap = kDefaultDenseCap);

// All eigenvalues, decreasing, without vectors (banded solver).
std::vector<double> eigenvalues(const Hamiltonian& H, std::size_t dense_cap = kDefaultDenseCap);

// Deterministic basis choice inside clusters of eigenvalues closer than gap_tol:
// project unit vectors in site order, Gram-Schmidt, orient first nonzero entry positive.
void canonicalize_eigenbasis(EigenData& data, double gap_tol = 1e-9);

enum class SpectrumEnd { low, high };

struct LobpcgOptions {
  double tol = 1e-8;          // absolute residual per wanted pair
  int max_iterations = 4000;
  int extra_block = -1;       // < 0: automatic
  std::uint64_t seed = 0x5eed;
  // test hook: force the iterative path even for tiny problems
  bool allow_dense_fallback = true;
};

struct ExtremalResult {
  EigenData data;  // values decreasing
  int iterations = 0;
  double max_residual = 0.0;
  bool used_dense = false;
};

ExtremalResult extremal_eigs(const Hamiltonian& H, std::size_t count, SpectrumEnd which,
                             const LobpcgOptions& opt = {});

// Lowest eigenvalue only, iterative.
double lowest_eigenvalue(const Hamiltonian& H, const LobpcgOptions& opt = {});

// (H - E)^{-1} with a factorization held for repeated column solves.
class Resolvent {
 public:
  Resolvent(const Hamiltonian& H, double E);
  ~Resolvent();
  Resolvent(const Resolvent&) = delete;
  Resolvent& operator=(const Resolvent&) = delete;

  Eigen::VectorXd column(std::size_t j) const;
  double entry(const Site& x, const Site& y) const;
  // power iteration on the inverse: estimate of 1 / dist(E, spectrum)
  double norm_estimate(int iterations = 60) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  const Hamiltonian& H_;
};

// Spectral collision threshold for the distance from E to the spectrum.
constexpr double kCollisionTol = 1e-12;

double resolvent_entry(const Hamiltonian& H, double E, const Site& x, const Site& y);

struct ResolventNorm {
  double norm = 0.0;
  double distance = 0.0;  // min_k |E_k - E|
  bool dense = true;
};

ResolventNorm resolvent_norm(const Hamiltonian& H, double E, std::size_t dense_cap = 4096);
double resolvent_norm_from_eigs(const std::vector<double>& eigs, double E);

// Entrywise decay bound |R(a,b)| <= exp(log_prefactor - rate * |a-b|).
struct DecayBound {
  enum class Metric { l1, l2 };
  double log_prefactor = 0.0;
  double rate = 0.0;
  Metric metric = Metric::l2;

  double log_bound(const Site& a, const Site& b) const;
};

struct EntryViolation {
  Site a, b;
  double value;
  double bound;
};

struct DecayCheckReport {
  std::size_t entries_checked = 0;
  std::size_t violation_count = 0;
  std::vector<EntryViolation> violations;  // first few
  bool norm_certified = false;
  double lambda_min = 0.0;
  double norm = 0.0;
  double worst_log_ratio = -1e300;  // max over entries of log(|R|) - log(bound)
  std::string method;
};

// Compares every entry of (H - E)^{-1} against the bound. A norm certificate is
// used when ||(H-E)^{-1}|| is already below the smallest bound value.
DecayCheckReport check_resolvent_decay(const Hamiltonian& H, double E, const DecayBound& bound,
                                       std::size_t max_reported = 16);

// Lattice Green's function with -Delta G = delta_0 on Z^d, d >= 3.
struct GreenOptions {
  double tol = 1e-7;
  int max_nodes = 720;
};
double lattice_green(const Site& a, int d = 3, const GreenOptions& opt = {});
double lattice_green(const std::vector<std::int64_t>& a, int d, const GreenOptions& opt = {});
// asymptotic constant of G(a) |a|^{d-2}
double green_asymptotic_constant(int d);

using ComplexVector = Eigen::VectorXcd;

ComplexVector evolve(const EigenData& eig, double t, const ComplexVector& psi0);

struct DynlocOptions {
  double t_max = 1000.0;
  int grid_points = 10000;
  int random_times = 1000;
  std::uint64_t seed = 1;
};

std::vector<double> default_time_grid(const DynlocOptions& opt);

// max over the grid of || <X>^b e^{-itH} P delta_center ||^s, P the spectral
// projection onto [0, E0], <X> multiplication by the Euclidean norm of the site.
double dynloc_moment(const Hamiltonian& H, double E0, double b, double s, const std::vector<double>& times);
double dynloc_moment(const EigenData& eig, const Cube& cube, double E0, double b, double s,
                     const std::vector<double>& times);

}  // namespace anderson
