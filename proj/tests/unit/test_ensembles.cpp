#include <doctest.h>

#include <cmath>

#include "anderson/ensembles.hpp"
#include "anderson/rng.hpp"

using namespace anderson;

TEST_CASE("distribution basics") {
  const auto ber = SiteDistribution::bernoulli(0.5);
  CHECK(ber.variance() == doctest::Approx(0.25));
  CHECK(SiteDistribution::uniform(0, 1).variance() == doctest::Approx(1.0 / 12));
  const SiteDistribution mix({{0.0, 0.5}}, {{0.0, 1.0, 0.5}});
  // E X = 1/4, E X^2 = 1/6, Var = 5/48
  CHECK(mix.variance() == doctest::Approx(5.0 / 48).epsilon(1e-14));
  CHECK(ber.quantile(0.5) == 0.0);
  CHECK(ber.quantile(0.5000001) == 1.0);
  CHECK(ber.quantile_right_limit(0.5) == 1.0);
  CHECK(ber.quantile_left_limit(0.5) == 0.0);
  CHECK_THROWS_AS(SiteDistribution({{0.0, 0.5}}, {}), DomainError);
  CHECK_THROWS_AS(SiteDistribution({}, {{1.0, 1.0, 1.0}}), DomainError);

  SequentialRng rng(3);
  const SiteDistribution law({{0.2, 0.3}, {0.7, 0.1}}, {{0.0, 0.5, 0.4}, {0.9, 1.0, 0.2}});
  for (int i = 0; i < 200; ++i) {
    const double u = rng.uniform();
    const double q = law.quantile(u);
    CHECK(law.cdf(q) >= u - 1e-14);
    CHECK(law.cdf_left(q) <= u + 1e-14);
  }
}

TEST_CASE("deterministic law samples exactly") {
  const auto field = PotentialField::uncertified(AssignmentRule::iid, {{"all", SiteDistribution::point(0.0)}}, 1.0);
  CHECK_FALSE(field.certified());
  for (double v : sample_potential(field, Cube({0, 0, 0}, 2), 7)) CHECK(v == 0.0);
}

TEST_CASE("point mass field is rejected") {
  CHECK_THROWS_AS(PotentialField::iid(SiteDistribution::point(0.0), 1.0, 0.01), DomainError);
}

TEST_CASE("sample potential") {
  const Cube c({0, 0, 0}, 2);
  const PotentialField cb(AssignmentRule::checkerboard,
                          {{"even", SiteDistribution::bernoulli(0.5)}, {"odd", SiteDistribution::uniform(0, 1)}}, 1.0,
                          1.0 / 12);
  const auto v = sample_potential(cb, c, 42);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Site n = c.site_at(i);
    if ((n[0] + n[1] + n[2]) % 2 == 0) {
      CHECK((v[i] == 0.0 || v[i] == 1.0));
    } else {
      CHECK(v[i] > 0.0);
      CHECK(v[i] < 1.0);
    }
  }
  CHECK(sample_potential(cb, c, 42) == v);
  CHECK(sample_potential(cb, c, 43) != v);
  // a site's value does not depend on the enclosing cube
  const auto big = sample_potential(cb, Cube({0, 0, 0}, 3), 42);
  CHECK(big[Cube({0, 0, 0}, 3).index_of({1, -1, 2})] == v[c.index_of({1, -1, 2})]);

  const PotentialField iface(AssignmentRule::interface,
                             {{"left", SiteDistribution::bernoulli(0.5, 2.0)}, {"right", SiteDistribution::uniform(0, 1)}},
                             2.0, 1.0 / 12);
  const auto w = sample_potential(iface, c, 5);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (c.site_at(i)[0] < 0) CHECK((w[i] == 0.0 || w[i] == 2.0));
}

TEST_CASE("anti-concentration") {
  CHECK(anti_concentration_sup(SiteDistribution::bernoulli(0.5), 0.5, 1.0) == doctest::Approx(0.5));
  CHECK(anti_concentration_bound(0.5, 1.0) == doctest::Approx(1.0 - 9.0 / 272));
  const double sigma = 1.0 / std::sqrt(12.0);
  CHECK(anti_concentration_sup(SiteDistribution::uniform(0, 1), sigma, 1.0) == doctest::Approx(sigma).epsilon(1e-12));
  CHECK_THROWS_AS(anti_concentration_sup(SiteDistribution::point(0.3), 0.1, 1.0), DomainError);

  SequentialRng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(5));
    std::vector<Atom> atoms;
    double tot = 0.0;
    for (int i = 0; i < k; ++i) {
      atoms.push_back({rng.uniform(0.0, 2.0), rng.uniform()});
      tot += atoms.back().prob;
    }
    for (auto& a : atoms) a.prob /= tot;
    double s = 0.0;
    for (auto& a : atoms) s += a.prob;
    atoms.back().prob += 1.0 - s;
    const SiteDistribution d(atoms, {});
    const double var = d.variance();
    if (var < 1e-6) continue;
    const double sg = std::sqrt(var);
    CHECK(anti_concentration_sup(d, sg, 2.0) <= anti_concentration_bound(sg, 2.0));
  }
}

TEST_CASE("bernoulli decomposition") {
  const auto ber = SiteDistribution::bernoulli(0.5);
  const auto d = bernoulli_decompose(ber, 0.5);
  CHECK(d.iota == 1.0);
  CHECK(d.Y(0.3) == 0.0);
  CHECK(d.Z(0.3) == 1.0);
  CHECK(verify_decomposition(d, ber).distance <= 1e-15);
  auto wrong = d;
  wrong.p = 0.6;
  CHECK(verify_decomposition(wrong, ber).distance == doctest::Approx(0.1).epsilon(1e-12));

  const auto uni = SiteDistribution::uniform(0, 1);
  const auto du = bernoulli_decompose(uni, 0.5);
  CHECK(du.iota == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(du.Y(0.4) == doctest::Approx(0.2));
  CHECK(du.Z(0.4) == doctest::Approx(0.5));
  const auto rep = verify_decomposition(du, uni);
  CHECK_FALSE(rep.atomic);
  CHECK(rep.distance < 1e-9);

  CHECK_THROWS_AS(bernoulli_decompose(SiteDistribution::point(0.4), 0.5), GapFailure);
  CHECK_THROWS_AS(bernoulli_decompose(ber, 1.0), DomainError);
}

TEST_CASE("certified decomposition") {
  for (double q : {0.1, 0.25, 0.5, 0.73, 0.9}) {
    const auto c = decompose_with_certificate(SiteDistribution::bernoulli(q), 1.0, q * (1 - q));
    REQUIRE(c.ok);
    CHECK(c.decomposition.iota == 1.0);
  }
  const auto cu = decompose_with_certificate(SiteDistribution::uniform(0, 1), 1.0, 1.0 / 12);
  REQUIRE(cu.ok);
  CHECK(cu.decomposition.iota >= 0.25);

  const double s2 = 1e-9;
  const SiteDistribution rare({{0.0, 1 - s2}, {1.0, s2}}, {});
  const auto cr = decompose_with_certificate(rare, 1.0, rare.variance());
  REQUIRE(cr.ok);
  CHECK(cr.in_regime);
  CHECK(cr.decomposition.p >= std::pow(std::sqrt(rare.variance()), 5) / 2);
  CHECK(cr.p_bound_ok);
  CHECK(cr.iota_bound_ok);
}

TEST_CASE("mixture identity over the p grid") {
  SequentialRng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(6));
    std::vector<Atom> atoms;
    double tot = 0.0;
    for (int i = 0; i < k; ++i) {
      atoms.push_back({static_cast<double>(rng.below(8)) / 4.0, 0.05 + rng.uniform()});
      tot += atoms.back().prob;
    }
    for (auto& a : atoms) a.prob /= tot;
    const SiteDistribution d(atoms, {});
    for (int j = 1; j <= 99; ++j) {
      const double p = j / 100.0;
      const double gap = decomposition_gap(d, p);
      if (!(gap > 0.0)) continue;
      const auto dec = bernoulli_decompose(d, p);
      CHECK(verify_decomposition(dec, d).distance <= 1e-12);
      for (double t = 0.01; t < 1.0; t += 0.07) {
        CHECK(dec.Z(t) >= dec.iota - 1e-15);
        CHECK(dec.Y(t) <= dec.Y(std::min(t + 0.05, 0.999)));
      }
    }
  }
}
