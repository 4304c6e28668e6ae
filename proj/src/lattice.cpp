#include "anderson/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "anderson/error.hpp"

namespace anderson {

std::int64_t norm1(const Site& a) {
  return std::llabs(a[0]) + std::llabs(a[1]) + std::llabs(a[2]);
}

std::int64_t norm_inf(const Site& a) {
  return std::max({std::llabs(a[0]), std::llabs(a[1]), std::llabs(a[2])});
}

double norm2(const Site& a) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) s += static_cast<double>(a[i]) * static_cast<double>(a[i]);
  return std::sqrt(s);
}

std::string to_string(const Site& a) {
  return "(" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," + std::to_string(a[2]) + ")";
}

std::size_t SiteHash::operator()(const Site& s) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int i = 0; i < kDim; ++i) {
    h ^= static_cast<std::uint64_t>(s[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Cube::Cube(Site center, std::int64_t radius) : center_(center), radius_(radius) {
  if (radius < 0) throw DomainError("cube radius must be non-negative");
}

std::size_t Cube::size() const {
  const auto s = static_cast<std::size_t>(side());
  return s * s * s;
}

bool Cube::contains(const Site& s) const { return norm_inf(s - center_) <= radius_; }

bool Cube::contains(const Cube& other) const {
  return norm_inf(other.center_ - center_) + other.radius_ <= radius_;
}

bool Cube::intersects(const Cube& other) const {
  return norm_inf(other.center_ - center_) <= radius_ + other.radius_;
}

std::size_t Cube::index_of(const Site& s) const {
  if (!contains(s)) throw DomainError("site " + to_string(s) + " outside cube");
  const std::int64_t n = side();
  const std::int64_t x = s[0] - center_[0] + radius_;
  const std::int64_t y = s[1] - center_[1] + radius_;
  const std::int64_t z = s[2] - center_[2] + radius_;
  return static_cast<std::size_t>((x * n + y) * n + z);
}

Site Cube::site_at(std::size_t index) const {
  if (index >= size()) throw DomainError("site index out of range");
  const auto n = static_cast<std::size_t>(side());
  const auto z = static_cast<std::int64_t>(index % n);
  const auto y = static_cast<std::int64_t>((index / n) % n);
  const auto x = static_cast<std::int64_t>(index / (n * n));
  return {center_[0] - radius_ + x, center_[1] - radius_ + y, center_[2] - radius_ + z};
}

std::vector<Site> cube_sites(const Cube& cube) {
  std::vector<Site> out;
  out.reserve(cube.size());
  for (std::size_t i = 0; i < cube.size(); ++i) out.push_back(cube.site_at(i));
  return out;
}

std::vector<Site> neighbors_in(const Cube& cube, const Site& site) {
  if (!cube.contains(site)) throw DomainError("site " + to_string(site) + " outside cube");
  std::vector<Site> out;
  for (int i = 0; i < kDim; ++i) {
    for (int d : {-1, 1}) {
      Site m = site;
      m[i] += d;
      if (cube.contains(m)) out.push_back(m);
    }
  }
  return out;
}

double distance_to_complement(const Site& a, const Cube& outer, const Cube& inner) {
  if (!inner.contains(a) || !outer.contains(a)) throw DomainError("point must lie in both cubes");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDim; ++i) {
    const std::int64_t lo_in = inner.center()[i] - inner.radius();
    const std::int64_t hi_in = inner.center()[i] + inner.radius();
    const std::int64_t lo_out = outer.center()[i] - outer.radius();
    const std::int64_t hi_out = outer.center()[i] + outer.radius();
    if (lo_in - 1 >= lo_out) best = std::min(best, static_cast<double>(a[i] - lo_in + 1));
    if (hi_in + 1 <= hi_out) best = std::min(best, static_cast<double>(hi_in + 1 - a[i]));
  }
  return best;
}

bool in_cone(const ConeSpec& spec, const Site& m) {
  const Site d = m - spec.apex;
  std::int64_t transverse = 0;
  for (int i = 0; i < kDim; ++i)
    if (i != spec.axis) transverse += std::llabs(d[i]);
  return std::llabs(d[spec.axis]) >= transverse;
}

std::vector<Site> cone_layer(const ConeSpec& spec, std::int64_t k, const Cube& cube) {
  if (spec.axis < 0 || spec.axis >= kDim) throw DomainError("cone axis must be 0, 1 or 2");
  if (spec.sign != 1 && spec.sign != -1) throw DomainError("cone sign must be +1 or -1");
  if (k < 0) throw DomainError("cone layer index must be non-negative");
  std::vector<Site> out;
  // (apex - m)[axis] = sign*k  =>  m[axis] = apex[axis] - sign*k
  const std::int64_t x = spec.apex[spec.axis] - spec.sign * k;
  const int a1 = (spec.axis + 1) % kDim;
  const int a2 = (spec.axis + 2) % kDim;
  for (std::int64_t d1 = -k; d1 <= k; ++d1) {
    const std::int64_t rest = k - std::llabs(d1);
    for (std::int64_t d2 = -rest; d2 <= rest; ++d2) {
      Site m;
      m[spec.axis] = x;
      m[a1] = spec.apex[a1] + d1;
      m[a2] = spec.apex[a2] + d2;
      if (cube.contains(m)) out.push_back(m);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

namespace {

std::int64_t half_scale(std::int64_t scale) { return std::max<std::int64_t>(scale / 2, 1); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_scale(const Cube& target, std::int64_t scale) {
  if (!is_power_of_two(scale)) throw DomainError("dyadic scale must be a power of two");
  if (target.radius() < scale) throw DomainError("target radius must be at least the cover scale");
}

}  // namespace

bool is_dyadic_cube(const Cube& cube) {
  if (!is_power_of_two(cube.radius())) return false;
  const std::int64_t h = half_scale(cube.radius());
  for (int i = 0; i < kDim; ++i)
    if (cube.center()[i] % h != 0) return false;
  return true;
}

std::vector<Cube> dyadic_cover(const Cube& target, std::int64_t scale) {
  check_scale(target, scale);
  const std::int64_t h = half_scale(scale);
  const std::int64_t reach = target.radius() + scale / 2;
  std::array<std::vector<std::int64_t>, kDim> axis;
  for (int i = 0; i < kDim; ++i) {
    const std::int64_t n = target.center()[i];
    // anchor on the half-lattice nearest to the target center, then step by the scale
    const std::int64_t anchor = floor_div(n + h / 2, h) * h;
    const std::int64_t lo = anchor - floor_div(anchor - (n - reach), scale) * scale;
    for (std::int64_t c = lo; c <= n + reach; c += scale) axis[static_cast<std::size_t>(i)].push_back(c);
  }
  std::vector<Cube> out;
  for (auto x : axis[0])
    for (auto y : axis[1])
      for (auto z : axis[2]) out.emplace_back(Site{x, y, z}, scale);
  return out;
}

std::vector<Cube> all_intersecting_dyadic_cubes(const Cube& target, std::int64_t scale) {
  check_scale(target, scale);
  const std::int64_t h = half_scale(scale);
  std::array<std::vector<std::int64_t>, kDim> axis;
  for (int i = 0; i < kDim; ++i) {
    const std::int64_t n = target.center()[i];
    const std::int64_t lo = -floor_div(-(n - target.radius() - scale), h) * h;
    for (std::int64_t c = lo; c <= n + target.radius() + scale; c += h) axis[static_cast<std::size_t>(i)].push_back(c);
  }
  std::vector<Cube> out;
  for (auto x : axis[0])
    for (auto y : axis[1])
      for (auto z : axis[2]) out.emplace_back(Site{x, y, z}, scale);
  return out;
}

}  // namespace anderson
