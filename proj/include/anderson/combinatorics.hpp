#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace anderson {

// Subsets of {0, ..., N-1} as bitmasks.
using Subset = std::uint32_t;

constexpr int kMaxGround = 24;
constexpr int kExactWitnessGround = 20;

inline int subset_size(Subset s) { return __builtin_popcount(s); }
inline Subset ground_mask(int N) { return N >= 32 ? ~Subset{0} : ((Subset{1} << N) - 1); }

// symmetric difference with {n}
Subset flip(Subset xi, int n, int N);

// Member A has a witness B(A) inside its complement with |B(A)| >= kappa |A^C| such
// that no other member A' satisfies A subset A' subset A u B(A).
struct SpernerFamily {
  int N = 0;
  std::vector<Subset> members;
  std::optional<std::vector<Subset>> witness;  // aligned with members

  SpernerFamily() = default;
  SpernerFamily(int N, std::vector<Subset> members, std::optional<std::vector<Subset>> witness = std::nullopt);
};

struct BernoulliEnsemble {
  std::vector<double> p;  // P[xi_n = 1], each in (0, 1)

  explicit BernoulliEnsemble(std::vector<double> probabilities);
  double beta() const;
  int size() const { return static_cast<int>(p.size()); }
};

struct WitnessSearch {
  std::vector<Subset> witness;  // largest admissible B(A) found per member
  double kappa = 1.0;           // min over members of |B(A)| / |A^C| (1 when A^C is empty)
  bool exact = true;            // false when the greedy fallback was used
};

// Per member, B(A) = A^C minus a minimum hitting set of {A' \ A : A' strictly contains A}.
// Exact backtracking for N <= 20, greedy (sound, possibly suboptimal) above.
WitnessSearch find_witness(const SpernerFamily& family);

struct SpernerCheck {
  bool ok = false;
  bool exhaustive = true;     // a negative answer is conclusive
  int failing_member = -1;    // first member without an admissible witness
  std::vector<Subset> witness;
};

// Uses the stored witness when present, otherwise searches.
SpernerCheck verify_kappa_sperner(const SpernerFamily& family, double kappa);

// Checks one witness system against the definition.
bool witness_valid(const SpernerFamily& family, const std::vector<Subset>& witness, double kappa,
                   int* failing_member = nullptr);

bool is_antichain(const SpernerFamily& family);

double family_probability(const SpernerFamily& family, const BernoulliEnsemble& ensemble);

// C beta^{-5/2} kappa^{-1} N^{-1/2}
double sperner_bound(double beta, double kappa, int N, double C);

SpernerFamily slice_family(int N, int k);

// Fixed-size random family: each member takes every element with probability density.
SpernerFamily random_family(int N, int count, double density, std::uint64_t seed);

// Gram-condition check for |<v_i, v_j> - delta_ij| <= alpha n^{-1/2}, and the
// counting inequality m <= ((alpha^2 - alpha)/2) n when alpha n >= 1/2.
struct AlmostOrthonormalReport {
  bool satisfies_gram = false;
  int bad_i = -1, bad_j = -1;  // first pair violating the Gram condition
  double worst_deviation = 0.0;  // max |<v_i,v_j> - delta_ij| sqrt(n)
  int m = 0;
  int n = 0;
  double bound = 0.0;
  bool applicable = false;  // Gram condition holds and alpha n >= 1/2
  bool bound_holds = true;  // m <= bound (meaningful when applicable)
};

AlmostOrthonormalReport almost_orthonormal_count_check(const std::vector<std::vector<double>>& vectors, double alpha);

// Random greedy search for a large family meeting the Gram condition: draws
// Gaussian unit vectors and keeps those compatible with all kept so far.
std::vector<std::vector<double>> almost_orthonormal_search(int n, double alpha, int attempts, int cap,
                                                           std::uint64_t seed);

}  // namespace anderson
