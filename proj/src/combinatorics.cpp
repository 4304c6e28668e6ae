#include "anderson/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "anderson/error.hpp"
#include "anderson/rng.hpp"

namespace anderson {

Subset flip(Subset xi, int n, int N) {
  if (n < 0 || n >= N) throw DomainError("flip index " + std::to_string(n) + " outside the ground set");
  return xi ^ (Subset{1} << n);
}

SpernerFamily::SpernerFamily(int N_, std::vector<Subset> members_, std::optional<std::vector<Subset>> witness_)
    : N(N_), members(std::move(members_)), witness(std::move(witness_)) {
  if (N < 0 || N > kMaxGround) throw DomainError("ground size must be in [0, 24]");
  const Subset g = ground_mask(N);
  std::set<Subset> seen;
  for (Subset a : members) {
    if (a & ~g) throw DomainError("member outside the ground set");
    if (!seen.insert(a).second) throw DomainError("duplicate member");
  }
  if (witness && witness->size() != members.size()) throw DomainError("witness count differs from member count");
}

BernoulliEnsemble::BernoulliEnsemble(std::vector<double> probabilities) : p(std::move(probabilities)) {
  for (double q : p)
    if (!(q > 0.0 && q < 1.0)) throw DomainError("Bernoulli probabilities must lie in (0, 1)");
}

double BernoulliEnsemble::beta() const {
  double b = 0.5;
  for (double q : p) b = std::min({b, q, 1.0 - q});
  return b;
}

namespace {

// sets to hit, with supersets of other sets removed
std::vector<Subset> reduce(std::vector<Subset> sets) {
  std::sort(sets.begin(), sets.end(), [](Subset a, Subset b) { return subset_size(a) < subset_size(b); });
  std::vector<Subset> out;
  for (Subset s : sets) {
    bool dominated = false;
    for (Subset t : out)
      if ((s & t) == t) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(s);
  }
  return out;
}

void hit_search(const std::vector<Subset>& sets, Subset chosen, int depth, int& best, Subset& best_set) {
  if (depth >= best) return;
  const Subset* pick = nullptr;
  for (const Subset& s : sets)
    if (!(s & chosen) && (!pick || subset_size(s) < subset_size(*pick))) pick = &s;
  if (!pick) {
    best = depth;
    best_set = chosen;
    return;
  }
  if (depth + 1 >= best) return;
  for (Subset rest = *pick; rest; rest &= rest - 1) {
    const Subset bit = rest & (~rest + 1);
    hit_search(sets, chosen | bit, depth + 1, best, best_set);
  }
}

Subset min_hitting_set(const std::vector<Subset>& raw) {
  const auto sets = reduce(raw);
  if (sets.empty()) return 0;
  int best = 64;
  Subset best_set = 0;
  hit_search(sets, 0, 0, best, best_set);
  return best_set;
}

Subset greedy_hitting_set(const std::vector<Subset>& raw, int N) {
  auto sets = reduce(raw);
  Subset chosen = 0;
  while (true) {
    std::vector<int> count(static_cast<std::size_t>(N), 0);
    bool any = false;
    for (Subset s : sets)
      if (!(s & chosen)) {
        any = true;
        for (int n = 0; n < N; ++n)
          if (s >> n & 1) ++count[static_cast<std::size_t>(n)];
      }
    if (!any) return chosen;
    const auto it = std::max_element(count.begin(), count.end());
    chosen |= Subset{1} << (it - count.begin());
  }
}

double ratio(Subset b, Subset complement) {
  const int c = subset_size(complement);
  return c == 0 ? 1.0 : static_cast<double>(subset_size(b)) / c;
}

}  // namespace

WitnessSearch find_witness(const SpernerFamily& family) {
  WitnessSearch out;
  out.exact = family.N <= kExactWitnessGround;
  const Subset g = ground_mask(family.N);
  for (Subset a : family.members) {
    std::vector<Subset> above;
    for (Subset b : family.members)
      if (b != a && (a & b) == a) above.push_back(b & ~a);
    const Subset hs = out.exact ? min_hitting_set(above) : greedy_hitting_set(above, family.N);
    const Subset comp = g & ~a;
    const Subset w = comp & ~hs;
    out.witness.push_back(w);
    out.kappa = std::min(out.kappa, ratio(w, comp));
  }
  return out;
}

bool witness_valid(const SpernerFamily& family, const std::vector<Subset>& witness, double kappa,
                   int* failing_member) {
  const Subset g = ground_mask(family.N);
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const Subset a = family.members[i];
    const Subset w = witness[i];
    const Subset comp = g & ~a;
    bool ok = (w & ~comp) == 0 && subset_size(w) >= kappa * subset_size(comp) - 1e-12;
    for (std::size_t j = 0; ok && j < family.members.size(); ++j) {
      const Subset b = family.members[j];
      if (j != i && (a & b) == a && ((b & ~a) & ~w) == 0) ok = false;
    }
    if (!ok) {
      if (failing_member) *failing_member = static_cast<int>(i);
      return false;
    }
  }
  return true;
}

SpernerCheck verify_kappa_sperner(const SpernerFamily& family, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in (0, 1]");
  SpernerCheck out;
  if (family.witness) {
    out.witness = *family.witness;
    out.exhaustive = false;
    out.ok = witness_valid(family, out.witness, kappa, &out.failing_member);
    if (out.ok) return out;
  }
  const auto search = find_witness(family);
  out.witness = search.witness;
  out.exhaustive = search.exact;
  out.failing_member = -1;
  out.ok = witness_valid(family, out.witness, kappa, &out.failing_member);
  return out;
}

bool is_antichain(const SpernerFamily& family) {
  for (Subset a : family.members)
    for (Subset b : family.members)
      if (a != b && (a & b) == a) return false;
  return true;
}

double family_probability(const SpernerFamily& family, const BernoulliEnsemble& ensemble) {
  if (ensemble.size() != family.N) throw DomainError("ensemble size differs from the ground size");
  long double total = 0.0L;
  for (Subset a : family.members) {
    long double prob = 1.0L;
    for (int n = 0; n < family.N; ++n) {
      const long double q = ensemble.p[static_cast<std::size_t>(n)];
      prob *= (a >> n & 1) ? q : 1.0L - q;
    }
    total += prob;
  }
  return static_cast<double>(total);
}

double sperner_bound(double beta, double kappa, int N, double C) {
  if (!(beta > 0.0 && beta <= 0.5)) throw DomainError("beta must lie in (0, 1/2]");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in (0, 1]");
  if (N < 1) throw DomainError("N must be >= 1");
  return C * std::pow(beta, -2.5) / kappa / std::sqrt(static_cast<double>(N));
}

SpernerFamily slice_family(int N, int k) {
  if (N < 0 || N > kMaxGround || k < 0 || k > N) throw DomainError("slice needs 0 <= k <= N <= 24");
  std::vector<Subset> members;
  for (Subset s = 0; s <= ground_mask(N); ++s) {
    if (subset_size(s) == k) members.push_back(s);
    if (s == ground_mask(N)) break;
  }
  std::vector<Subset> witness;
  for (Subset a : members) witness.push_back(ground_mask(N) & ~a);
  return SpernerFamily(N, std::move(members), std::move(witness));
}

SpernerFamily random_family(int N, int count, double density, std::uint64_t seed) {
  if (N < 1 || N > kMaxGround) throw DomainError("ground size must be in [1, 24]");
  const double space = std::ldexp(1.0, N);
  if (count < 0 || count > space) throw DomainError("too many members requested");
  SequentialRng rng(seed, 0x5e7);
  std::set<Subset> seen;
  std::vector<Subset> members;
  while (static_cast<int>(members.size()) < count) {
    Subset s = 0;
    for (int n = 0; n < N; ++n)
      if (rng.uniform() < density) s |= Subset{1} << n;
    if (seen.insert(s).second) members.push_back(s);
  }
  return SpernerFamily(N, std::move(members));
}

AlmostOrthonormalReport almost_orthonormal_count_check(const std::vector<std::vector<double>>& vectors, double alpha) {
  if (!(alpha >= 2.0)) throw DomainError("the counting bound is asserted only for alpha >= 2");
  AlmostOrthonormalReport rep;
  rep.m = static_cast<int>(vectors.size());
  rep.n = vectors.empty() ? 0 : static_cast<int>(vectors.front().size());
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != rep.n) throw DomainError("vectors differ in dimension");
  if (rep.n == 0) throw DomainError("empty vectors");
  const double tol = alpha / std::sqrt(static_cast<double>(rep.n));
  rep.satisfies_gram = true;
  for (int i = 0; i < rep.m; ++i)
    for (int j = i; j < rep.m; ++j) {
      double dot = 0.0;
      for (int k = 0; k < rep.n; ++k)
        dot += vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
               vectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      const double dev = std::abs(dot - (i == j ? 1.0 : 0.0));
      rep.worst_deviation = std::max(rep.worst_deviation, dev * std::sqrt(static_cast<double>(rep.n)));
      if (dev > tol && rep.satisfies_gram) {
        rep.satisfies_gram = false;
        rep.bad_i = i;
        rep.bad_j = j;
      }
    }
  rep.bound = (alpha * alpha - alpha) / 2.0 * rep.n;
  rep.applicable = rep.satisfies_gram && alpha * rep.n >= 0.5;
  rep.bound_holds = rep.m <= rep.bound;
  return rep;
}

std::vector<std::vector<double>> almost_orthonormal_search(int n, double alpha, int attempts, int cap,
                                                           std::uint64_t seed) {
  if (n < 1) throw DomainError("dimension must be positive");
  SequentialRng rng(seed, 0xa0);
  const double tol = alpha / std::sqrt(static_cast<double>(n));
  std::vector<std::vector<double>> kept;
  for (int t = 0; t < attempts && static_cast<int>(kept.size()) < cap; ++t) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double nn = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      nn += x * x;
    }
    for (auto& x : v) x /= std::sqrt(nn);
    bool ok = true;
    for (const auto& w : kept) {
      double dot = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) dot += v[k] * w[k];
      if (std::abs(dot) > tol) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(std::move(v));
  }
  return kept;
}

}  // namespace anderson
