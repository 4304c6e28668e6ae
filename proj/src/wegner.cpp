#include "anderson/wegner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/CholmodSupport>
#include <Eigen/SparseLU>

#include "anderson/error.hpp"
#include "anderson/rng.hpp"

namespace anderson {

namespace {

bool is_dyadic(double L) {
  if (!(L >= 1.0) || L != std::floor(L) || L > 9.0e15) return false;
  return is_power_of_two(static_cast<std::int64_t>(L));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// E_m with sentinels, m 1-based
double eig_at(const std::vector<double>& e, int m) {
  if (m <= 0) return kInf;
  if (m > static_cast<int>(e.size())) return -kInf;
  return e[static_cast<std::size_t>(m - 1)];
}

}  // namespace

WegnerScales::WegnerScales(std::array<double, 6> scales, double eps, double del, double C)
    : L(scales), epsilon(eps), delta(del), C_shift(C) {
  if (!(epsilon > delta && delta > 0.0)) throw DomainError("need epsilon > delta > 0");
  for (double l : L)
    if (!is_dyadic(l)) throw DomainError("scales must be powers of two");
  for (int j = 0; j < 5; ++j) {
    const double hi = std::pow(L[j], 1.0 - 2.0 * delta);
    const double lo = std::pow(L[j], 1.0 - epsilon / 2.0);
    if (!(hi >= L[j + 1] && L[j + 1] >= lo))
      throw DomainError("scale L" + std::to_string(j + 1) + " outside [L" + std::to_string(j) + "^(1-eps/2), L" +
                        std::to_string(j) + "^(1-2 delta)]");
  }
}

double WegnerScales::log_s(int i) const { return -L[1] + (L[2] - L[4] + C_shift) * i; }

AnnulusEvent::AnnulusEvent(int k1_, int k2_, int ell_, double s_ell_, double s_next_)
    : k1(k1_), k2(k2_), ell(ell_), s_ell(s_ell_), s_next(s_next_) {
  if (k1 < 1 || k2 < k1) throw DomainError("annulus event needs 1 <= k1 <= k2");
  if (!(s_ell >= 0.0 && s_next > s_ell)) throw DomainError("annulus radii must satisfy 0 <= s_ell < s_ell+1");
}

AnnulusEvent AnnulusEvent::from_scales(const WegnerScales& scales, int k1, int k2, int ell) {
  if (!(scales.L[2] - scales.L[4] + scales.C_shift > 0.0)) throw DomainError("L2 - L4 + C must be positive");
  return AnnulusEvent(k1, k2, ell, std::exp(scales.log_s(ell)), std::exp(scales.log_s(ell + 1)));
}

bool annulus_event_holds(const std::vector<double>& e, double Ebar, const AnnulusEvent& ev) {
  if (ev.k2 > static_cast<int>(e.size())) throw DomainError("annulus index beyond the spectrum");
  for (std::size_t m = 1; m < e.size(); ++m)
    if (e[m] > e[m - 1]) throw DomainError("eigenvalues must be sorted decreasing");
  return std::abs(eig_at(e, ev.k1) - Ebar) <= ev.s_ell && std::abs(eig_at(e, ev.k2) - Ebar) <= ev.s_ell &&
         std::abs(eig_at(e, ev.k1 - 1) - Ebar) >= ev.s_next && std::abs(eig_at(e, ev.k2 + 1) - Ebar) >= ev.s_next;
}

bool annulus_predicate(const std::vector<double>& e, double Ebar, double s_ell, double s_next) {
  bool inner = false, above = false, below = false;
  for (double x : e) {
    const double d = std::abs(x - Ebar);
    if (d <= s_ell) {
      inner = true;
    } else if (d < s_next) {
      return false;
    } else if (x > Ebar) {
      above = true;
    } else {
      below = true;
    }
  }
  return inner && above && below;
}

PushReport eigen_push_check(const Eigen::MatrixXd& A, const std::array<double, 5>& r, int k, double eta, double c) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || n == 0) throw DomainError("matrix must be square and nonempty");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw DomainError("matrix must be symmetric");
  if (k < 0 || k >= n) throw DomainError("coordinate index out of range");
  if (!(eta >= 1.0)) throw DomainError("eta must be >= 1");

  PushReport rep;
  if (!(0.0 < r[0] && r[0] < r[1] && r[1] < r[2] && r[2] < r[3] && r[3] < r[4] && r[4] < 1.0)) {
    rep.failed_hypothesis = 1;
    return rep;
  }
  if (!(r[0] <= c * std::min(r[2] * r[4], r[1] * r[2] / r[3]))) {
    rep.failed_hypothesis = 2;
    return rep;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  // decreasing order, 1-based as lambda_1 >= ... >= lambda_n
  std::vector<double> lam(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  for (Eigen::Index m = 0; m < n; ++m) {
    const Eigen::Index src = n - 1 - m;
    lam[static_cast<std::size_t>(m)] = es.eigenvalues()(src);
    const double x = es.eigenvectors()(k, src);
    w[static_cast<std::size_t>(m)] = x * x;
  }
  auto count_at_least = [&](const Eigen::VectorXd& vals) {
    int cnt = 0;
    for (Eigen::Index m = 0; m < vals.size(); ++m) cnt += vals(m) >= r[0];
    return cnt;
  };
  rep.count_before = count_at_least(es.eigenvalues());
  Eigen::MatrixXd B = A;
  B(k, k) += eta;
  rep.count_after = count_at_least(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly).eigenvalues());
  rep.pushed = rep.count_after > rep.count_before;

  // hypothesis 3: lambda_i < r1 < r2 < lambda_{i-1} with lambda_i > 0
  int i = 0;
  for (int m = 0; m < n; ++m)
    if (lam[static_cast<std::size_t>(m)] < r[0]) {
      i = m + 1;
      break;
    }
  if (i < 2 || !(lam[static_cast<std::size_t>(i - 2)] > r[1]) || !(lam[static_cast<std::size_t>(i - 1)] > 0.0)) {
    rep.failed_hypothesis = 3;
    return rep;
  }
  rep.i = i;

  // hypothesis 4: some j >= i with lambda_j > 0 and weight >= r3; degenerate
  // clusters may rotate their weight onto one vector
  const double tol = 1e-12 * std::max(1.0, std::abs(lam.front()) + std::abs(lam.back()));
  for (int m = i; m <= n && lam[static_cast<std::size_t>(m - 1)] > 0.0 && rep.j == 0;) {
    int end = m;
    double cluster = 0.0;
    while (end <= n && lam[static_cast<std::size_t>(m - 1)] - lam[static_cast<std::size_t>(end - 1)] <= tol) {
      cluster += w[static_cast<std::size_t>(end - 1)];
      ++end;
    }
    if (cluster >= r[2]) rep.j = m;
    m = end;
  }
  if (rep.j == 0) {
    rep.failed_hypothesis = 4;
    return rep;
  }

  double mid = 0.0;
  for (int m = 0; m < n; ++m)
    if (lam[static_cast<std::size_t>(m)] > r[1] && lam[static_cast<std::size_t>(m)] < r[4]) mid += w[static_cast<std::size_t>(m)];
  if (mid > r[3]) {
    rep.failed_hypothesis = 5;
    return rep;
  }
  return rep;
}

PushInstance random_push_instance(int n, std::uint64_t seed, double c) {
  if (n < 2) throw DomainError("push instances need dimension >= 2");
  SequentialRng rng(seed, 0x9054);
  PushInstance out;
  auto& r = out.r;
  r[4] = rng.uniform(0.3, 0.95);
  r[3] = r[4] * rng.uniform(0.1, 0.9);
  r[2] = r[3] * rng.uniform(0.1, 0.9);
  r[1] = r[2] * rng.uniform(0.1, 0.9);
  r[0] = std::min(0.9 * r[1], c * std::min(r[2] * r[4], r[1] * r[2] / r[3])) * rng.uniform(0.1, 1.0);

  const int above = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
  const int below = n - above;
  std::vector<double> lam;
  std::vector<int> group;  // 0 high (>= r5), 1 mid (r2, r5), 2 below r1
  for (int m = 0; m < above; ++m) {
    if (rng.uniform() < 0.5) {
      lam.push_back(rng.uniform(r[1], r[4]));
      group.push_back(1);
    } else {
      lam.push_back(rng.uniform(r[4], 1.5));
      group.push_back(0);
    }
  }
  const double top = rng.uniform(0.05, 0.95) * r[0];
  std::vector<int> positive_below;
  for (int m = 0; m < below; ++m) {
    const double v = m == 0 ? top : (rng.uniform() < 0.5 ? rng.uniform(0.0, top) : rng.uniform(-0.5, 0.0));
    if (v > 0.0) positive_below.push_back(static_cast<int>(lam.size()));
    lam.push_back(v);
    group.push_back(2);
  }
  const int j = positive_below[rng.below(positive_below.size())];

  // target row: weight >= r3 on v_j, at most r4 on the (r2, r5) group
  std::vector<double> w2(static_cast<std::size_t>(n), 0.0);
  const double u = rng.uniform(0.01, 1.0);
  w2[static_cast<std::size_t>(j)] = r[2] + (1.0 - r[2]) * u * u;
  double rest = 1.0 - w2[static_cast<std::size_t>(j)];
  std::vector<int> mid, other;
  for (int m = 0; m < n; ++m) {
    if (m == j) continue;
    (group[static_cast<std::size_t>(m)] == 1 ? mid : other).push_back(m);
  }
  auto spread = [&](const std::vector<int>& idx, double total) {
    std::vector<double> e(idx.size());
    double s = 0.0;
    for (auto& x : e) s += (x = -std::log(rng.uniform()));
    for (std::size_t q = 0; q < idx.size(); ++q) w2[static_cast<std::size_t>(idx[q])] += total * e[q] / s;
  };
  if (!mid.empty()) {
    const double t = 0.999 * rng.uniform() * std::min(r[3], rest);
    spread(mid, t);
    rest -= t;
  }
  if (!other.empty()) {
    spread(other, rest);
  } else {
    w2[static_cast<std::size_t>(j)] += rest;
  }
  Eigen::VectorXd target(n);
  for (int m = 0; m < n; ++m) target(m) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::sqrt(std::max(0.0, w2[static_cast<std::size_t>(m)]));
  target.normalize();

  Eigen::MatrixXd G(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) G(a, b) = rng.normal();
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  out.k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  const Eigen::VectorXd q = Q.row(out.k).transpose();
  const Eigen::VectorXd v = q - target;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  if (v.norm() > 1e-14) P -= 2.0 * v * v.transpose() / v.squaredNorm();
  const Eigen::MatrixXd V = Q * P;  // row k of V equals the target
  Eigen::VectorXd d(n);
  for (int m = 0; m < n; ++m) d(m) = lam[static_cast<std::size_t>(m)];
  out.A = V * d.asDiagonal() * V.transpose();
  out.A = 0.5 * (out.A + out.A.transpose());
  return out;
}

namespace {

struct NodeEig {
  double E = 0.0;
  double gap = 0.0;
};

NodeEig branch_value(const Cube& cube, const std::vector<double>& V, int k) {
  const auto eigs = eigenvalues(assemble(cube, V));
  NodeEig out;
  out.E = eigs[static_cast<std::size_t>(k - 1)];
  const double up = k >= 2 ? eigs[static_cast<std::size_t>(k - 2)] - out.E : kInf;
  const double down = k < static_cast<int>(eigs.size()) ? out.E - eigs[static_cast<std::size_t>(k)] : kInf;
  out.gap = std::min(up, down);
  return out;
}

std::vector<double> mix(const std::vector<double>& a, const std::vector<double>& d, double s) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = std::max(0.0, a[i] + s * d[i]);
  return v;
}

Eigen::VectorXd eigenvector_near(const Hamiltonian& H, double E, double gap) {
  const double shift = E - std::min(1e-3 * gap, 1e-6);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  const Eigen::SparseMatrix<double> A = H.sparse(shift);
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericError("inverse iteration factorization failed", gap);
  const auto n = static_cast<Eigen::Index>(H.dim());
  SequentialRng rng(0xfe11, H.dim());
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
  x.normalize();
  for (int it = 0; it < 6; ++it) {
    x = lu.solve(x);
    x.normalize();
  }
  return x;
}

}  // namespace

FhPathReport fh_path(const Hamiltonian& H_start, const Hamiltonian& H_end, int k, int steps, bool throw_on_crossing) {
  if (!(H_start.cube() == H_end.cube())) throw DomainError("path endpoints live on different cubes");
  if (H_start.hopping() != H_end.hopping()) throw DomainError("path endpoints differ off the diagonal");
  if (k < 1 || k > static_cast<int>(H_start.dim())) throw DomainError("eigenvalue index out of range");
  if (steps < 1) throw DomainError("steps must be >= 1");
  const Cube& cube = H_start.cube();
  const auto& V0 = H_start.potential();
  std::vector<double> dV(V0.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < V0.size(); ++i) {
    dV[i] = H_end.potential()[i] - V0[i];
    dmax = std::max(dmax, std::abs(dV[i]));
  }

  FhPathReport rep;
  for (int step = 0; step <= steps; ++step) {
    FhNode node;
    node.s = static_cast<double>(step) / steps;
    const auto Vs = mix(V0, dV, node.s);
    const NodeEig ne = branch_value(cube, Vs, k);
    node.E = ne.E;
    node.gap = ne.gap;
    node.simple = ne.gap >= kCrossingGap;
    if (!node.simple) {
      ++rep.crossings;
      if (throw_on_crossing)
        throw NumericError("eigenvalue crossing on the path at s = " + std::to_string(node.s), ne.gap);
      rep.nodes.push_back(node);
      continue;
    }
    if (dmax == 0.0) {
      rep.nodes.push_back(node);
      continue;
    }
    const Hamiltonian Hs(cube, Vs, H_start.hopping());
    const Eigen::VectorXd u = eigenvector_near(Hs, node.E, node.gap);
    for (std::size_t i = 0; i < dV.size(); ++i) node.fh += dV[i] * u(static_cast<Eigen::Index>(i)) * u(static_cast<Eigen::Index>(i));

    {
      // step well inside the gap so the branch stays analytic over the stencil;
      // end nodes use one-sided stencils that stay on [0, 1]
      const double h = std::clamp(0.05 * node.gap / dmax, 1e-6, 1e-3);
      const double dir = step == 0 ? 1.0 : step == steps ? -1.0 : 0.0;
      auto at = [&](double ds) {
        const NodeEig e = branch_value(cube, mix(V0, dV, node.s + ds), k);
        if (e.gap < kCrossingGap) node.simple = false;
        return e.E;
      };
      auto diff = [&](double hh) {
        if (dir == 0.0) return (at(hh) - at(-hh)) / (2.0 * hh);
        return dir * (-3.0 * node.E + 4.0 * at(dir * hh) - at(2.0 * dir * hh)) / (2.0 * hh);
      };
      const double d1 = diff(h);
      const double d2 = diff(0.5 * h);
      node.fd = (4.0 * d2 - d1) / 3.0;
      node.rel_error = std::abs(node.fh - node.fd) / std::max(std::abs(node.fh), 1e-3 * dmax);
      if (node.simple) {
        rep.max_rel_error = std::max(rep.max_rel_error, node.rel_error);
      } else {
        ++rep.crossings;
      }
    }
    rep.nodes.push_back(node);
  }
  return rep;
}

MassSets mass_sets(const Cube& cube, const Eigen::VectorXd& u, const std::set<Site>& xi, const std::set<Site>& excluded,
                   int i, double threshold) {
  if (i != 0 && i != 1) throw DomainError("i must be 0 or 1");
  if (static_cast<std::size_t>(u.size()) != cube.size()) throw DomainError("vector length differs from cube size");
  MassSets out;
  for (std::size_t idx = 0; idx < cube.size(); ++idx) {
    const Site n = cube.site_at(idx);
    if (excluded.count(n)) continue;
    const int x = xi.count(n) ? 1 : 0;
    if (x == 1 - i) {
      out.S1.push_back(n);
    } else if (std::abs(u(static_cast<Eigen::Index>(idx))) >= threshold) {
      out.S2.push_back(n);
    }
  }
  return out;
}

std::size_t uc_mass_count(const Eigen::VectorXd& u, const Cube& cube, double threshold_factor,
                          const std::set<Site>& excluded) {
  if (static_cast<std::size_t>(u.size()) != cube.size()) throw DomainError("vector length differs from cube size");
  const double t = threshold_factor * u.norm();
  std::size_t count = 0;
  for (std::size_t idx = 0; idx < cube.size(); ++idx)
    if (std::abs(u(static_cast<Eigen::Index>(idx))) >= t && !excluded.count(cube.site_at(idx))) ++count;
  return count;
}

Site cone_descent(const Eigen::VectorXd& u, double K, const Site& apex, int axis, int sign, int k, const Cube& cube) {
  if (k < 1) throw DomainError("cone layer index must be >= 1");
  if (!cube.contains(apex)) throw DomainError("apex outside the cube");
  if (static_cast<std::size_t>(u.size()) != cube.size()) throw DomainError("vector length differs from cube size");
  const ConeSpec spec{apex, axis, sign};
  const auto outer = cone_layer(spec, k, cube);
  if (outer.empty()) throw DomainError("cone layer " + std::to_string(k) + " misses the cube");
  const auto inner = cone_layer(spec, k - 1, cube);
  const double target = std::pow(K + 11.0, -k) * std::abs(u(static_cast<Eigen::Index>(cube.index_of(apex))));
  const Site* best = nullptr;
  double best_val = -1.0;
  for (const auto* layer : {&outer, &inner})
    for (const Site& m : *layer) {
      const double v = std::abs(u(static_cast<Eigen::Index>(cube.index_of(m))));
      if (v > best_val) {
        best_val = v;
        best = &m;
      }
    }
  if (!best || best_val < target * (1.0 - 1e-12))
    throw FindingError("cone descent failed at apex " + to_string(apex) + ", axis " + std::to_string(axis) +
                       ", sign " + std::to_string(sign) + ", k " + std::to_string(k));
  return *best;
}

ProportionEstimate wilson_interval(std::size_t hits, std::size_t trials) {
  if (trials == 0) throw DomainError("trials must be >= 1");
  constexpr double z = 1.959964;
  ProportionEstimate e;
  e.hits = hits;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  e.p_hat = static_cast<double>(hits) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (e.p_hat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(e.p_hat * (1.0 - e.p_hat) / n + z * z / (4.0 * n * n)) / denom;
  e.lo = std::max(0.0, center - half);
  e.hi = std::min(1.0, center + half);
  return e;
}

namespace {

// sign * (H - shift) is positive definite iff its Cholesky factorization succeeds. The
// sparsity pattern is shared by every Hamiltonian on a cube, so it is analysed once.
class DefiniteTest {
 public:
  DefiniteTest() {
    llt_.cholmod().print = 0;
    llt_.cholmod().quick_return_if_not_posdef = 1;
  }
  bool operator()(const Hamiltonian& H, double shift, double sign) {
    const Eigen::SparseMatrix<double> A = sign * H.sparse(shift);
    if (!analysed_) {
      llt_.analyzePattern(A);
      analysed_ = true;
    }
    llt_.factorize(A);
    return llt_.info() == Eigen::Success;
  }

 private:
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>> llt_;
  bool analysed_ = false;
};

// log ||(H - Ebar)^{-1}|| > log_threshold. With r = exp(-log_threshold), the event fails
// outright when the whole spectrum lies above Ebar + r or below Ebar - r.
bool resolvent_exceeds(const Hamiltonian& H, double Ebar, double log_threshold, DefiniteTest& definite) {
  const double r = std::exp(-log_threshold);
  if (r > 0.0 && (definite(H, Ebar + r, 1.0) || definite(H, Ebar - r, -1.0))) return false;
  try {
    return std::log(resolvent_norm(H, Ebar).norm) > log_threshold;
  } catch (const NumericError&) {
    return true;  // Ebar on the spectrum: the norm is unbounded
  }
}

}  // namespace

ProportionEstimate wegner_mc(const PotentialField& field, const Cube& cube, double Ebar, double log_threshold,
                             std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  std::size_t hits = 0;
  DefiniteTest definite;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto H = assemble(cube, sample_potential(field, cube, seed, t + 1));
    hits += resolvent_exceeds(H, Ebar, log_threshold, definite);
  }
  return wilson_interval(hits, trials);
}

RobustnessReport good_robustness_probe(const PotentialField& field, const Cube& cube, double Ebar,
                                       const std::set<Site>& observed, std::size_t probes, std::uint64_t seed,
                                       double log_prefactor, double m) {
  for (const Site& o : observed)
    if (!cube.contains(o)) throw DomainError("observed site outside the cube");
  const auto sample = sample_potential(field, cube, seed, 0);
  const bool all_observed = observed.size() == cube.size();
  const DecayBound bound{log_prefactor, m, DecayBound::Metric::l2};
  RobustnessReport rep;
  rep.good = true;
  const std::size_t total = all_observed ? 1 : probes + 1;
  for (std::size_t j = 0; j < total; ++j) {
    std::vector<double> V = sample;
    if (j > 0) {
      const auto fresh = sample_potential(field, cube, seed, j + 1);
      for (std::size_t i = 0; i < V.size(); ++i)
        if (!observed.count(cube.site_at(i))) V[i] = fresh[i];
    }
    ++rep.probes_run;
    bool ok = false;
    try {
      ok = check_resolvent_decay(assemble(cube, V), Ebar, bound, 1).violation_count == 0;
    } catch (const NumericError&) {
      ok = false;
    }
    if (!ok) {
      rep.good = false;
      rep.first_failure = j;
      break;
    }
  }
  return rep;
}

}  // namespace anderson
