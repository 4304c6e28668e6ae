#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace anderson {

constexpr int kDim = 3;

struct Site {
  std::array<std::int64_t, kDim> c{0, 0, 0};

  Site() = default;
  Site(std::int64_t x, std::int64_t y, std::int64_t z) : c{x, y, z} {}

  std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend auto operator<=>(const Site&, const Site&) = default;
  friend Site operator+(Site a, const Site& b) {
    for (int i = 0; i < kDim; ++i) a[i] += b[i];
    return a;
  }
  friend Site operator-(Site a, const Site& b) {
    for (int i = 0; i < kDim; ++i) a[i] -= b[i];
    return a;
  }
};

std::int64_t norm1(const Site& a);
std::int64_t norm_inf(const Site& a);
double norm2(const Site& a);
std::string to_string(const Site& a);

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept;
};

// l-infinity ball of radius L around center; (2L+1)^3 sites.
class Cube {
 public:
  Cube() = default;
  Cube(Site center, std::int64_t radius);

  const Site& center() const { return center_; }
  std::int64_t radius() const { return radius_; }
  std::int64_t side() const { return 2 * radius_ + 1; }
  std::size_t size() const;

  bool contains(const Site& s) const;
  bool contains(const Cube& other) const;
  bool intersects(const Cube& other) const;

  // Lexicographic index ((x-x0)*s + (y-y0))*s + (z-z0) with x0 the lower corner.
  std::size_t index_of(const Site& s) const;
  Site site_at(std::size_t index) const;

  friend bool operator==(const Cube&, const Cube&) = default;

 private:
  Site center_;
  std::int64_t radius_ = 0;
};

std::vector<Site> cube_sites(const Cube& cube);
std::vector<Site> neighbors_in(const Cube& cube, const Site& site);

// Euclidean distance from a to outer \ inner; +inf when the difference is empty.
// a must lie in both cubes.
double distance_to_complement(const Site& a, const Cube& outer, const Cube& inner);

struct ConeSpec {
  Site apex;
  int axis = 0;  // 0, 1, 2
  int sign = 1;  // -1 or +1
};

// Sites m of cube with (apex - m)[axis] = sign*k and |(m-apex)[axis]| dominating
// the l1 norm of the transverse displacement. k = 0 is the apex.
std::vector<Site> cone_layer(const ConeSpec& spec, std::int64_t k, const Cube& cube);
bool in_cone(const ConeSpec& spec, const Site& m);

bool is_power_of_two(std::int64_t v);
bool is_dyadic_cube(const Cube& cube);

// Dyadic scale-Lk cubes covering target with at most (2L/Lk + 2)^3 members;
// every site of the target has a member at distance >= Lk/2 + 1 from the
// complement.
std::vector<Cube> dyadic_cover(const Cube& target, std::int64_t scale);

// Every dyadic scale-Lk cube meeting target.
std::vector<Cube> all_intersecting_dyadic_cubes(const Cube& target, std::int64_t scale);

}  // namespace anderson
