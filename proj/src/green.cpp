#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>

#include "anderson/operators.hpp"

namespace anderson {

namespace {

struct Rule {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;
};

const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule r;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  auto add = [&](double z) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x.push_back(0.5 * (z + 1.0));
    r.w.push_back(0.5 * w);
  };
  for (double z : zeros) {
    add(z);
    if (z != 0.0) add(-z);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

// Folded integral over [0, pi]^d split into d pyramids with theta_k the largest
// coordinate; theta = r (.., 1, ..) scaled by y in [0, 1]^(d-1).
double green_rule(const std::vector<std::int64_t>& a, int d, int n) {
  const Rule& R = gauss_legendre(n);
  const double pi = std::numbers::pi;
  const std::size_t m = R.x.size();
  double total = 0.0;
  std::vector<double> cosv(m * static_cast<std::size_t>(d)), omc(m);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d - 1));
  for (int k = 0; k < d; ++k) {
    std::vector<std::int64_t> rest;
    for (int j = 0; j < d; ++j)
      if (j != k) rest.push_back(a[static_cast<std::size_t>(j)]);
    double pyramid = 0.0;
    for (std::size_t ir = 0; ir < m; ++ir) {
      const double r = pi * R.x[ir];
      const double wr = pi * R.w[ir];
      for (std::size_t iy = 0; iy < m; ++iy) {
        const double th = r * R.x[iy];
        omc[iy] = one_minus_cos(th);
        for (int j = 0; j < d - 1; ++j)
          cosv[iy * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
              std::cos(static_cast<double>(rest[static_cast<std::size_t>(j)]) * th);
      }
      const double head = std::cos(static_cast<double>(a[static_cast<std::size_t>(k)]) * r);
      const double head_den = one_minus_cos(r);
      double inner = 0.0;
      if (d == 3) {
        for (std::size_t i1 = 0; i1 < m; ++i1) {
          const double c1 = cosv[i1 * 3] * R.w[i1];
          const double d1 = head_den + omc[i1];
          for (std::size_t i2 = 0; i2 < m; ++i2)
            inner += c1 * cosv[i2 * 3 + 1] * R.w[i2] / (d1 + omc[i2]);
        }
      } else {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
          double num = 1.0, den = head_den;
          for (int j = 0; j < d - 1; ++j) {
            const std::size_t i = idx[static_cast<std::size_t>(j)];
            num *= cosv[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] * R.w[i];
            den += omc[i];
          }
          inner += num / den;
          int j = 0;
          while (j < d - 1 && ++idx[static_cast<std::size_t>(j)] == m) idx[static_cast<std::size_t>(j++)] = 0;
          if (j == d - 1) break;
        }
      }
      pyramid += wr * std::pow(r, d - 1) * head * inner;
    }
    total += pyramid;
  }
  // integrand is cos(..)/(2 sum (1 - cos)); the fold contributes pi^-d
  return total / (2.0 * std::pow(pi, d));
}

}  // namespace

double lattice_green(const std::vector<std::int64_t>& a, int d, const GreenOptions& opt) {
  if (d < 3) throw DomainError("lattice Green's function needs d >= 3");
  if (static_cast<int>(a.size()) != d) throw DomainError("site dimension mismatch");
  std::vector<std::int64_t> b(a.size());
  std::transform(a.begin(), a.end(), b.begin(), [](std::int64_t v) { return v < 0 ? -v : v; });
  std::sort(b.begin(), b.end());

  static std::mutex mu;
  static std::map<std::pair<int, std::vector<std::int64_t>>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({d, b});
    if (it != cache.end()) return it->second;
  }

  const std::int64_t amax = *std::max_element(b.begin(), b.end());
  int n = static_cast<int>(16 + 2 * amax);
  if (d > 3) n = std::min(n, 40);
  double prev = green_rule(b, d, n);
  double err = std::numeric_limits<double>::infinity();
  double value = prev;
  while (true) {
    const int next = static_cast<int>(std::ceil(1.5 * n));
    if (next > opt.max_nodes) break;
    value = green_rule(b, d, next);
    err = std::abs(value - prev);
    n = next;
    prev = value;
    if (err < opt.tol) break;
  }
  if (!(err < opt.tol))
    throw NumericError("lattice Green quadrature did not reach tolerance; achieved " + std::to_string(err), err);
  std::lock_guard<std::mutex> lock(mu);
  cache[{d, b}] = value;
  return value;
}

double lattice_green(const Site& a, int d, const GreenOptions& opt) {
  if (d != 3) throw DomainError("Site overload is three-dimensional");
  return lattice_green(std::vector<std::int64_t>{a[0], a[1], a[2]}, 3, opt);
}

double green_asymptotic_constant(int d) {
  if (d < 3) throw DomainError("needs d >= 3");
  return std::tgamma(0.5 * d - 1.0) / (4.0 * std::pow(std::numbers::pi, 0.5 * d));
}

}  // namespace anderson
