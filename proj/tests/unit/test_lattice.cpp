#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "anderson/error.hpp"
#include "anderson/lattice.hpp"
#include "anderson/rng.hpp"

using namespace anderson;

TEST_CASE("cube enumeration") {
  CHECK(cube_sites(Cube({0, 0, 0}, 0)) == std::vector<Site>{Site{0, 0, 0}});
  CHECK(cube_sites(Cube({0, 0, 0}, 1)).size() == 27);
  const Cube c({1, 0, -1}, 2);
  const auto sites = cube_sites(c);
  CHECK(sites.size() == 125);
  CHECK(std::is_sorted(sites.begin(), sites.end()));
  for (std::size_t i = 0; i < sites.size(); ++i) {
    CHECK(norm_inf(sites[i] - c.center()) <= 2);
    CHECK(c.index_of(sites[i]) == i);
  }
  CHECK(c.side() == 5);
  CHECK_THROWS_AS(Cube({0, 0, 0}, -1), DomainError);
}

TEST_CASE("neighbours") {
  const Cube c({0, 0, 0}, 2);
  CHECK(neighbors_in(c, {0, 0, 0}).size() == 6);
  CHECK(neighbors_in(c, {2, 2, 2}).size() == 3);
  CHECK(neighbors_in(Cube({0, 0, 0}, 0), {0, 0, 0}).empty());
  CHECK_THROWS_AS(neighbors_in(c, {3, 0, 0}), DomainError);
  for (const auto& s : cube_sites(c)) {
    const auto nb = neighbors_in(c, s);
    CHECK(nb.size() >= 3);
    CHECK(nb.size() <= 6);
    for (const auto& m : nb) {
      CHECK(norm1(m - s) == 1);
      const auto back = neighbors_in(c, m);
      CHECK(std::find(back.begin(), back.end(), s) != back.end());
    }
  }
}

TEST_CASE("cone layers") {
  const ConeSpec spec{{0, 0, 0}, 0, 1};
  const auto l1 = cone_layer(spec, 1, Cube({0, 0, 0}, 3));
  const std::set<Site> expect{{-1, 0, 0}, {-1, 1, 0}, {-1, -1, 0}, {-1, 0, 1}, {-1, 0, -1}};
  CHECK(std::set<Site>(l1.begin(), l1.end()) == expect);
  CHECK(cone_layer(spec, 4, Cube({0, 0, 0}, 2)).empty());
  CHECK(cone_layer(spec, 0, Cube({0, 0, 0}, 2)) == std::vector<Site>{Site{0, 0, 0}});

  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {-1, 1}) {
      const ConeSpec sp{{0, 0, 0}, axis, sign};
      std::set<Site> seen;
      for (std::int64_t k = 1; k <= 10; ++k) {
        const auto layer = cone_layer(sp, k, Cube({0, 0, 0}, 12));
        CHECK(static_cast<std::int64_t>(layer.size()) == 2 * k * k + 2 * k + 1);
        // brute force predicate on the plane
        std::size_t brute = 0;
        for (std::int64_t y = -12; y <= 12; ++y)
          for (std::int64_t z = -12; z <= 12; ++z) {
            Site m;
            m[axis] = -sign * k;
            m[(axis + 1) % 3] = y;
            m[(axis + 2) % 3] = z;
            if (in_cone(sp, m)) ++brute;
          }
        CHECK(brute == layer.size());
        for (const auto& m : layer) CHECK(seen.insert(m).second);
      }
    }
  }
  CHECK_THROWS_AS(cone_layer({{0, 0, 0}, 3, 1}, 1, Cube({0, 0, 0}, 2)), DomainError);
}

TEST_CASE("dyadic cover") {
  CHECK_THROWS_AS(dyadic_cover(Cube({0, 0, 0}, 16), 3), DomainError);
  CHECK_THROWS_AS(dyadic_cover(Cube({0, 0, 0}, 2), 4), DomainError);

  const Cube self({4, -8, 0}, 8);
  REQUIRE(is_dyadic_cube(self));
  const auto sc = dyadic_cover(self, 8);
  CHECK(std::find(sc.begin(), sc.end(), self) != sc.end());

  const auto cover = dyadic_cover(Cube({0, 0, 0}, 16), 4);
  CHECK(cover.size() <= 1000);
  for (const auto& q : cover) CHECK(is_dyadic_cube(q));

  SequentialRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t Lk = std::int64_t{1} << (1 + rng.below(3));
    const std::int64_t L = Lk + static_cast<std::int64_t>(rng.below(12));
    const Cube target({static_cast<std::int64_t>(rng.below(21)) - 10, static_cast<std::int64_t>(rng.below(21)) - 10,
                       static_cast<std::int64_t>(rng.below(21)) - 10},
                      L);
    const auto Q = dyadic_cover(target, Lk);
    const double bound = std::pow(2.0 * static_cast<double>(L) / static_cast<double>(Lk) + 2.0, 3);
    CHECK(static_cast<double>(Q.size()) <= bound);
    for (const auto& q : Q) {
      CHECK(is_dyadic_cube(q));
      CHECK(q.intersects(target));
    }
    for (int s = 0; s < 50; ++s) {
      Site a = target.center();
      for (int i = 0; i < 3; ++i) a[i] += static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * L + 1))) - L;
      double best = 0.0;
      for (const auto& q : Q)
        if (q.contains(a)) best = std::max(best, distance_to_complement(a, target, q));
      CHECK(best >= static_cast<double>(Lk) / 8.0);
    }
  }
  const auto all = all_intersecting_dyadic_cubes(Cube({0, 0, 0}, 16), 4);
  for (const auto& q : cover) CHECK(std::find(all.begin(), all.end(), q) != all.end());
}

TEST_CASE("distance to complement") {
  const Cube outer({0, 0, 0}, 16);
  CHECK(distance_to_complement({16, 16, 16}, outer, Cube({8, 8, 8}, 8)) == 17.0);
  CHECK(distance_to_complement({4, 4, 4}, outer, Cube({0, 0, 0}, 8)) == 5.0);
  CHECK(std::isinf(distance_to_complement({0, 0, 0}, outer, outer)));
}
