#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "anderson/ensembles.hpp"
#include "anderson/operators.hpp"
#include "anderson/rng.hpp"

using namespace anderson;

namespace {

// free Dirichlet spectrum on a cube: triple sums of 2 - 2cos(j pi/(s+1))
std::vector<double> tensor_spectrum(std::int64_t L) {
  const std::int64_t s = 2 * L + 1;
  std::vector<double> one;
  for (std::int64_t j = 1; j <= s; ++j) one.push_back(2.0 - 2.0 * std::cos(std::numbers::pi * j / (s + 1)));
  std::vector<double> out;
  for (double a : one)
    for (double b : one)
      for (double c : one) out.push_back(a + b + c);
  std::sort(out.rbegin(), out.rend());
  return out;
}

Hamiltonian random_hamiltonian(std::int64_t L, std::uint64_t seed, double M = 1.0) {
  const Cube c({0, 0, 0}, L);
  std::vector<double> v(c.size());
  SequentialRng rng(seed);
  for (auto& x : v) x = M * rng.uniform();
  return assemble(c, v);
}

}  // namespace

TEST_CASE("assembly") {
  const Cube c({0, 0, 0}, 0);
  const auto H = assemble(c, std::vector<double>{0.3});
  CHECK(H.dense()(0, 0) == doctest::Approx(6.3));
  std::map<Site, double> partial{{Site{0, 0, 0}, 1.0}};
  CHECK_THROWS_AS(assemble(Cube({0, 0, 0}, 1), partial), DomainError);
  CHECK_THROWS_AS(assemble(c, std::vector<double>{-1.0}), DomainError);

  const auto H2 = random_hamiltonian(2, 1);
  const Eigen::MatrixXd D = H2.dense();
  CHECK((D - D.transpose()).norm() == 0.0);
  for (Eigen::Index i = 0; i < D.rows(); ++i) CHECK(D.row(i).sum() - D(i, i) >= -6.0);
  Eigen::VectorXd x = Eigen::VectorXd::Random(D.rows());
  CHECK((H2.apply(x) - D * x).norm() < 1e-12);
}

TEST_CASE("free spectrum matches the tensor formula") {
  for (std::int64_t L : {1, 2}) {
    const auto H = assemble(Cube({0, 0, 0}, L), std::vector<double>(Cube({0, 0, 0}, L).size(), 0.0));
    const auto ref = tensor_spectrum(L);
    const auto eig = eigendecompose(H);
    const auto banded = eigenvalues(H);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(std::abs(eig.values[i] - ref[i]) < 1e-10);
      CHECK(std::abs(banded[i] - ref[i]) < 1e-10);
    }
  }
  CHECK(tensor_spectrum(1).back() == doctest::Approx(3 * (2 - std::sqrt(2.0))));
}

TEST_CASE("dense eigendecomposition invariants") {
  const auto H = random_hamiltonian(2, 7);
  const auto e = eigendecompose(H);
  CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
  const double norm = H.norm_bound();
  for (std::size_t k = 0; k < e.count(); ++k) {
    const Eigen::VectorXd u = e.vectors.col(static_cast<Eigen::Index>(k));
    CHECK((H.apply(u) - e.values[k] * u).norm() <= 1e-10 * norm);
    CHECK(e.values[k] >= 0.0);
    CHECK(e.values[k] <= 13.0);
  }
  const Eigen::MatrixXd gram = e.vectors.transpose() * e.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
  double trace = 0.0, sum = 0.0;
  for (double v : e.values) sum += v;
  for (double v : H.potential()) trace += 6.0 + v;
  CHECK(std::abs(trace - sum) < 1e-8);

  // shift by a constant
  std::vector<double> shifted = H.potential();
  for (auto& v : shifted) v += 0.75;
  const auto es = eigenvalues(assemble(H.cube(), shifted));
  for (std::size_t k = 0; k < es.size(); ++k) CHECK(std::abs(es[k] - e.values[k] - 0.75) < 1e-10);

  // diagonal hook: hopping suppressed
  const Hamiltonian Dg(H.cube(), H.potential(), false);
  auto sorted = H.potential();
  std::sort(sorted.rbegin(), sorted.rend());
  const auto ed = eigendecompose(Dg);
  for (std::size_t k = 0; k < sorted.size(); ++k) CHECK(ed.values[k] == doctest::Approx(sorted[k]));

  CHECK_THROWS_AS(eigendecompose(H, 10), DomainError);
}

TEST_CASE("degenerate clusters get a deterministic basis") {
  const Cube c({0, 0, 0}, 1);
  const auto H = assemble(c, std::vector<double>(c.size(), 0.0));
  const auto a = eigendecompose(H);
  const auto b = eigendecompose(H);
  CHECK((a.vectors - b.vectors).norm() == 0.0);
  for (std::size_t k = 0; k < a.count(); ++k) {
    const auto col = a.vectors.col(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < col.size(); ++i)
      if (std::abs(col(i)) > 1e-8) {
        CHECK(col(i) > 0.0);
        break;
      }
  }
}

TEST_CASE("monotonicity under a potential increase") {
  SequentialRng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto H = random_hamiltonian(1, 100 + trial);
    auto v = H.potential();
    v[rng.below(v.size())] += rng.uniform();
    const auto before = eigenvalues(H);
    const auto after = eigenvalues(assemble(H.cube(), v));
    for (std::size_t k = 0; k < before.size(); ++k) CHECK(after[k] >= before[k] - 1e-12);
  }
}

TEST_CASE("LOBPCG agrees with the dense solver") {
  const Cube c7({0, 0, 0}, 7);
  const auto H0 = assemble(c7, std::vector<double>(c7.size(), 0.0));
  const auto r0 = extremal_eigs(H0, 3, SpectrumEnd::low);
  const auto ref = tensor_spectrum(7);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(r0.data.values[2 - k] - ref[ref.size() - 1 - k]) < 1e-8);
  CHECK(r0.max_residual <= 1e-8);

  for (std::uint64_t seed : {1, 2}) {
    const auto H = random_hamiltonian(4, seed, 2.0);
    const auto dense = eigenvalues(H);
    const auto lo = extremal_eigs(H, 5, SpectrumEnd::low);
    const auto hi = extremal_eigs(H, 5, SpectrumEnd::high);
    CHECK_FALSE(lo.used_dense);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(std::abs(lo.data.values[4 - k] - dense[dense.size() - 1 - k]) < 1e-8);
      CHECK(std::abs(hi.data.values[k] - dense[k]) < 1e-8);
    }
    for (std::size_t k = 0; k < 5; ++k) {
      const Eigen::VectorXd u = lo.data.vectors.col(static_cast<Eigen::Index>(k));
      CHECK((H.apply(u) - lo.data.values[k] * u).norm() <= 1e-8);
    }
  }
  CHECK(extremal_eigs(random_hamiltonian(2, 1), 0, SpectrumEnd::low).data.count() == 0);
}

TEST_CASE("resolvent entries and norms") {
  const auto H1 = assemble(Cube({0, 0, 0}, 0), std::vector<double>{0.4});
  CHECK(resolvent_entry(H1, 1.0, {0, 0, 0}, {0, 0, 0}) == doctest::Approx(1.0 / 5.4));

  const auto H = random_hamiltonian(2, 9);
  CHECK(std::abs(resolvent_entry(H, 0.5, {1, 0, 0}, {0, 2, -1}) - resolvent_entry(H, 0.5, {0, 2, -1}, {1, 0, 0})) <
        1e-10);

  const Cube c3({0, 0, 0}, 3);
  const auto F = assemble(c3, std::vector<double>(c3.size(), 0.0));
  const auto e = eigendecompose(F);
  SequentialRng rng(1);
  for (int t = 0; t < 10; ++t) {
    const std::size_t i = rng.below(c3.size()), j = rng.below(c3.size());
    double spectral = 0.0;
    for (std::size_t k = 0; k < e.count(); ++k)
      spectral += e.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                  e.vectors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) / (e.values[k] + 1.0);
    CHECK(std::abs(resolvent_entry(F, -1.0, c3.site_at(i), c3.site_at(j)) - spectral) < 1e-8);
  }

  // midpoint between two eigenvalues, and below the spectrum
  const auto vals = eigenvalues(H);
  const double mid = 0.5 * (vals[10] + vals[11]);
  CHECK(resolvent_norm(H, mid).norm == doctest::Approx(2.0 / (vals[10] - vals[11])).epsilon(1e-10));
  CHECK(resolvent_norm(H, vals.back() - 0.25).norm == doctest::Approx(4.0).epsilon(1e-10));
  const Eigen::MatrixXd inv = H.dense(0.3).inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inv);
  CHECK(resolvent_norm(H, 0.3).norm == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-9));
  // iterative path
  CHECK(resolvent_norm(H, 0.3, 10).norm == doctest::Approx(resolvent_norm(H, 0.3).norm).epsilon(1e-7));

  CHECK_THROWS_AS(resolvent_entry(H, vals[4], {0, 0, 0}, {0, 0, 0}), NumericError);
  CHECK_THROWS_AS(resolvent_norm(H, vals[4]), NumericError);
}

TEST_CASE("decay check") {
  const auto H = random_hamiltonian(2, 4);
  DecayBound loose{10.0, 0.0, DecayBound::Metric::l2};
  const auto rep = check_resolvent_decay(H, 0.0, loose);
  CHECK(rep.norm_certified);
  CHECK(rep.violation_count == 0);
  DecayBound tight{-20.0, 1.0, DecayBound::Metric::l1};
  const auto bad = check_resolvent_decay(H, 0.0, tight);
  CHECK_FALSE(bad.norm_certified);
  CHECK(bad.violation_count == bad.entries_checked);
}

TEST_CASE("time evolution") {
  const auto H = random_hamiltonian(1, 12);
  const auto e = eigendecompose(H);
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(H.dim()));
  psi(13) = 1.0;
  CHECK((evolve(e, 0.0, psi) - psi).norm() < 1e-12);
  const auto out = evolve(e, 3.7, psi);
  CHECK(std::abs(out.norm() - 1.0) < 1e-10);
  const Eigen::MatrixXcd U = (std::complex<double>(0, -3.7) * H.dense().cast<std::complex<double>>()).exp();
  CHECK((U * psi - out).norm() < 1e-8);

  // 2-site toy through the diagonal hook is trivial; use a 2x2 closed form instead
  EigenData two;
  two.values = {1.0, -1.0};
  two.vectors.resize(2, 2);
  two.vectors << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  ComplexVector p0(2);
  p0 << 1.0, 0.0;
  const double t = 0.9;
  const auto p1 = evolve(two, t, p0);
  // H = sigma_x: e^{-itH} e1 = (cos t, -i sin t)
  CHECK(std::abs(p1(0) - std::complex<double>(std::cos(t), 0)) < 1e-12);
  CHECK(std::abs(p1(1) - std::complex<double>(0, -std::sin(t))) < 1e-12);
}

TEST_CASE("dynamical moment") {
  const Cube c({0, 0, 0}, 2);
  const auto F = assemble(c, std::vector<double>(c.size(), 0.0));
  const std::vector<double> times{0.0, 0.5, 1.3, 4.0};
  CHECK(dynloc_moment(F, 0.01, 1.0, 0.5, times) == 0.0);

  const auto e = eigendecompose(F);
  const double E0 = 3.0;
  // b = 0: ||P delta_0||^s, constant in t
  Eigen::VectorXd pd = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.size()));
  const auto ic = static_cast<Eigen::Index>(c.index_of({0, 0, 0}));
  for (std::size_t k = 0; k < e.count(); ++k)
    if (e.values[k] <= E0) pd += e.vectors(ic, static_cast<Eigen::Index>(k)) * e.vectors.col(static_cast<Eigen::Index>(k));
  CHECK(dynloc_moment(F, E0, 0.0, 0.5, times) == doctest::Approx(std::pow(pd.norm(), 0.5)).epsilon(1e-10));

  // direct functional calculus oracle
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F.dense());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(F.dense().rows(), F.dense().cols());
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) <= E0) P += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
  double best = 0.0;
  for (double t : times) {
    const Eigen::MatrixXcd U = (std::complex<double>(0, -t) * F.dense().cast<std::complex<double>>()).exp();
    Eigen::VectorXcd v = U * (P.col(ic).cast<std::complex<double>>());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= norm2(c.site_at(static_cast<std::size_t>(i)));
    best = std::max(best, v.norm());
  }
  CHECK(std::abs(dynloc_moment(F, E0, 1.0, 1.0, times) - best) < 1e-8);
}
