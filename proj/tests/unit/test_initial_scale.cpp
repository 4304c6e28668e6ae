#include <doctest.h>

#include <cmath>
#include <numbers>

#include "anderson/initial_scale.hpp"
#include "anderson/rng.hpp"

using namespace anderson;

namespace {

constexpr double kG0 = 0.252731009858663;

std::vector<Site> where(const Cube& c, auto pred) {
  std::vector<Site> out;
  for (const Site& s : cube_sites(c))
    if (pred(s)) out.push_back(s);
  return out;
}

}  // namespace

TEST_CASE("R-net check") {
  const Cube c({0, 0, 0}, 3);
  CHECK(check_rnet(c, cube_sites(c), 1).ok);
  const auto empty = check_rnet(c, {}, 1);
  CHECK_FALSE(empty.ok);
  CHECK(std::isinf(empty.worst_distance));
  const auto even = where(c, [](const Site& s) { return (s[0] + s[1] + s[2]) % 2 == 0; });
  CHECK(check_rnet(c, even, 1).ok);
  const auto corner = check_rnet(c, {Site{-3, -3, -3}}, 2);
  CHECK_FALSE(corner.ok);
  CHECK(corner.worst == Site{3, 3, 3});
  CHECK(corner.worst_distance == doctest::Approx(6 * std::sqrt(3.0)));
  CHECK_THROWS_AS(check_rnet(c, {}, 0), DomainError);
}

TEST_CASE("principal lower bound") {
  const double eps = 0.04 / (4.0 * std::numbers::pi);
  CHECK(lifshitz_epsilon(3) == doctest::Approx(eps).epsilon(1e-14));
  CHECK(principal_lower_bound(1.0, 3, 2.0) == doctest::Approx(6.0 * eps / (1.0 + kG0) / 8.0).epsilon(1e-9));
  double prev = 0.0;
  for (double k : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double b = principal_lower_bound(k, 3, 3.0);
    CHECK(b > prev);
    prev = b;
  }
  const double k = 1e-6;
  CHECK(principal_lower_bound(k, 3, 2.0) / (6.0 * eps * k / 8.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(principal_lower_bound(1.0, 2, 2.0), DomainError);
}

TEST_CASE("Lifshitz test function") {
  const Cube c({0, 0, 0}, 3);
  const auto all = lifshitz_test_function(c, cube_sites(c), 1, 1.0);
  for (double v : all.u0) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  // the inner/outer separation holds at the pinned epsilon for every R
  for (std::int64_t R = 1; R <= 6; ++R) {
    const auto tf = lifshitz_test_function(Cube({0, 0, 0}, 0), {Site{0, 0, 0}}, R, 0.5);
    CHECK(tf.outer_min > tf.inner_max);
  }

  SequentialRng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const std::int64_t R = 2 + trial % 2;
    const double kappa = trial < 3 ? 0.5 : 1.0;
    const Cube cube({0, 0, 0}, 5);
    const auto H = assemble(cube, random_rnet_potential(cube, R, kappa, 1.0, 50 + trial));
    const auto cert = make_rnet_certificate(H, kappa, R);
    const auto tf = lifshitz_test_function(cube, cert.big_sites, R, kappa);
    for (double v : tf.u0) {
      CHECK(v > 0.0);
      CHECK(v <= tf.cap);
    }
    const auto rep = verify_lifshitz(H, cert);
    CHECK(rep.supersolution_ok);
    CHECK(rep.min_ratio >= rep.bound);
    CHECK(rep.pass);
  }
}

TEST_CASE("verify Lifshitz") {
  const Cube c({0, 0, 0}, 4);
  const auto flat = assemble(c, std::vector<double>(c.size(), 0.7));
  const auto rep = verify_lifshitz(flat, make_rnet_certificate(flat, 0.7, 1));
  CHECK(rep.pass);
  CHECK(rep.lambda_min >= 0.7 - 1e-12);

  // big set on a 2R-spaced sublattice: not an R-net, but a 2R-net
  const std::int64_t R = 2;
  std::vector<double> v(c.size(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Site s = c.site_at(i);
    if (s[0] % (2 * R) == 0 && s[1] % (2 * R) == 0 && s[2] % (2 * R) == 0) v[i] = 1.0;
  }
  const auto H = assemble(c, v);
  CHECK_THROWS_AS(make_rnet_certificate(H, 1.0, R), DomainError);
  const auto r2 = verify_lifshitz(H, make_rnet_certificate(H, 1.0, 2 * R));
  CHECK(r2.pass);
  CHECK(r2.supersolution_ok);

  auto cert = make_rnet_certificate(flat, 0.7, 1);
  cert.kappa = 0.8;
  CHECK_THROWS_AS(verify_lifshitz(flat, cert), DomainError);
}

TEST_CASE("Neumann decay") {
  const auto one = assemble(Cube({0, 0, 0}, 0), std::vector<double>{1.0});
  const auto r1 = neumann_decay_check(one, 0.0, 1.0, 1, 3, 1.0);
  CHECK(r1.violation_count == 0);

  const Cube c({0, 0, 0}, 8);
  const auto H = assemble(c, std::vector<double>(c.size(), 1.0));
  const auto rep = neumann_decay_check(H, 0.0, 1.0, 1, 3, 1.0);
  CHECK(rep.violation_count == 0);
  CHECK(rep.entries_checked == c.size() * c.size());
  const auto nb = neumann_bound(1.0, 3, 1, 1.0);
  CHECK(rep.norm <= 2.0 / nb.g);
  CHECK(nb.q < 1.0);

  CHECK_THROWS_AS(neumann_decay_check(H, nb.g, 1.0, 1, 3, 1.0), DomainError);
  CHECK_THROWS_AS(neumann_decay_check(H, 0.0, 1.0, 1, 3, 0.5), DomainError);

  // small cube, direct entrywise comparison against the dense inverse
  const Cube s({0, 0, 0}, 2);
  const auto Hs = assemble(s, random_rnet_potential(s, 1, 1.0, 1.0, 3));
  const auto nbs = neumann_bound(1.0, 3, 1, 1.0);
  const Eigen::MatrixXd inv = Hs.dense(nbs.g / 2).inverse();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      CHECK(std::log(std::abs(inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))) <=
            nbs.bound.log_bound(s.site_at(i), s.site_at(j)));
}

TEST_CASE("powers of the Neumann operator are local") {
  const Cube c({0, 0, 0}, 2);
  const auto H = assemble(c, random_rnet_potential(c, 1, 1.0, 1.0, 4));
  const double M = 1.0;
  const Eigen::MatrixXd T = Eigen::MatrixXd::Identity(H.dim(), H.dim()) - H.dense() / (12.0 + M);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(H.dim(), H.dim());
  for (int i = 0; i <= 6; ++i) {
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = 0; b < c.size(); ++b)
        if (norm1(c.site_at(a) - c.site_at(b)) > i)
          CHECK(P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) == 0.0);
    P = P * T;
  }
  // spectrum of T inside [0, 1)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(es.eigenvalues().maxCoeff() < 1.0);
}

TEST_CASE("random R-net potentials") {
  for (std::int64_t R : {2, 3, 4}) {
    const Cube c({0, 0, 0}, 6);
    const auto v = random_rnet_potential(c, R, 0.5, 1.0, 9);
    for (double x : v) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
    CHECK_NOTHROW(make_rnet_certificate(assemble(c, v), 0.5, R));
    CHECK(random_rnet_potential(c, R, 0.5, 1.0, 9) == v);
  }
}
