#include "anderson/initial_scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anderson/error.hpp"
#include "anderson/rng.hpp"

namespace anderson {

namespace {

std::vector<Site> ball_offsets(std::int64_t r2_max, bool strict) {
  std::vector<Site> out;
  const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(r2_max))) + 1;
  for (std::int64_t x = -r; x <= r; ++x)
    for (std::int64_t y = -r; y <= r; ++y)
      for (std::int64_t z = -r; z <= r; ++z) {
        const std::int64_t n2 = x * x + y * y + z * z;
        if (strict ? n2 < r2_max : n2 <= r2_max) out.push_back({x, y, z});
      }
  return out;
}

std::int64_t norm_sq(const Site& s) { return s[0] * s[0] + s[1] * s[1] + s[2] * s[2]; }

std::vector<char> big_mask(const Cube& cube, const std::vector<Site>& big_sites) {
  std::vector<char> mask(cube.size(), 0);
  for (const Site& b : big_sites) {
    if (!cube.contains(b)) throw DomainError("big site " + to_string(b) + " outside the cube");
    mask[cube.index_of(b)] = 1;
  }
  return mask;
}

double green3(const Site& a) { return lattice_green(a, 3, GreenOptions{1e-10, 720}); }

}  // namespace

RNetCheck check_rnet(const Cube& cube, const std::vector<Site>& big_sites, std::int64_t R) {
  if (R < 1) throw DomainError("R must be >= 1");
  const auto mask = big_mask(cube, big_sites);
  auto offs = ball_offsets(R * R, false);
  std::sort(offs.begin(), offs.end(), [](const Site& a, const Site& b) { return norm_sq(a) < norm_sq(b); });

  RNetCheck out;
  out.ok = true;
  out.worst = cube.center();
  out.worst_distance = -1.0;
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const Site a = cube.site_at(i);
    double d = std::numeric_limits<double>::infinity();
    for (const Site& o : offs) {
      const Site b = a + o;
      if (cube.contains(b) && mask[cube.index_of(b)]) {
        d = std::sqrt(static_cast<double>(norm_sq(o)));
        break;
      }
    }
    if (!std::isfinite(d)) {
      out.ok = false;
      for (const Site& b : big_sites) d = std::min(d, norm2(b - a));
    }
    if (d > out.worst_distance) {
      out.worst_distance = d;
      out.worst = a;
    }
  }
  return out;
}

RNetCertificate make_rnet_certificate(const Hamiltonian& H, double kappa, std::int64_t R) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  RNetCertificate c;
  c.cube = H.cube();
  c.R = R;
  c.kappa = kappa;
  for (std::size_t i = 0; i < H.dim(); ++i)
    if (H.potential()[i] >= kappa) c.big_sites.push_back(H.cube().site_at(i));
  const auto chk = check_rnet(c.cube, c.big_sites, R);
  if (!chk.ok)
    throw DomainError("{V >= kappa} is not an R-net: " + to_string(chk.worst) + " at distance " +
                      std::to_string(chk.worst_distance));
  return c;
}

double lifshitz_epsilon(int d) {
  if (d < 3) throw DomainError("the Lifshitz bound needs d >= 3");
  const double C = green_asymptotic_constant(d);
  if (d == 3) return 0.04 * C;
  return (0.9 - 1.1 * std::pow(2.0, 2 - d)) / 9.0 * C;
}

double principal_constant(double kappa, int d) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  const double g0 = d == 3 ? green3({0, 0, 0}) : lattice_green(std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), d);
  return 2.0 * d * lifshitz_epsilon(d) / (1.0 / kappa + g0);
}

double principal_lower_bound(double kappa, int d, double R) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  return principal_constant(kappa, d) * std::pow(R, -d);
}

LifshitzTestFunction lifshitz_test_function(const Cube& cube, const std::vector<Site>& big_sites, std::int64_t R,
                                            double kappa, int d) {
  if (d != 3) throw DomainError("the explicit test function is built on Z^3 cubes only");
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  const auto net = check_rnet(cube, big_sites, R);
  if (!net.ok) throw DomainError("big set is not an R-net at " + to_string(net.worst));

  LifshitzTestFunction tf;
  tf.epsilon = lifshitz_epsilon(3);
  const double g0 = green3({0, 0, 0});
  tf.cap = 1.0 / kappa + g0;
  const double scale = tf.epsilon / static_cast<double>(R * R * R);
  auto u = [&](const Site& a) { return 1.0 / kappa + g0 - green3(a) - scale * static_cast<double>(norm_sq(a)); };

  const std::int64_t r2 = R * R;
  auto window = ball_offsets(9 * r2, true);
  std::vector<std::pair<double, Site>> ranked;
  ranked.reserve(window.size());
  tf.inner_max = -std::numeric_limits<double>::infinity();
  tf.outer_min = std::numeric_limits<double>::infinity();
  tf.window_min = std::numeric_limits<double>::infinity();
  for (const Site& o : window) {
    const double v = u(o);
    const std::int64_t n2 = norm_sq(o);
    if (n2 <= r2) tf.inner_max = std::max(tf.inner_max, v);
    if (n2 >= 4 * r2) tf.outer_min = std::min(tf.outer_min, v);
    tf.window_min = std::min(tf.window_min, v);
    ranked.emplace_back(v, o);
  }
  if (!(tf.outer_min > tf.inner_max))
    throw DomainError("R too small: min of u over 2R <= |a| < 3R (" + std::to_string(tf.outer_min) +
                      ") does not exceed max over |a| <= R (" + std::to_string(tf.inner_max) + ")");
  if (!(tf.window_min > 0.0)) throw DomainError("R too small: u is not positive on |a| < 3R");

  // scanning offsets by increasing u, the first big site hit realises the minimum
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto mask = big_mask(cube, big_sites);
  tf.u0.assign(cube.size(), 0.0);
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const Site a = cube.site_at(i);
    bool found = false;
    for (const auto& [v, o] : ranked) {
      const Site b = a + o;
      if (cube.contains(b) && mask[cube.index_of(b)]) {
        tf.u0[i] = v;
        found = true;
        break;
      }
    }
    if (!found) throw DomainError("no big site within 3R of " + to_string(a));
  }
  return tf;
}

LifshitzReport verify_lifshitz(const Hamiltonian& H, const RNetCertificate& cert, bool with_test_function) {
  if (!(H.cube() == cert.cube)) throw DomainError("certificate cube differs from the operator's cube");
  for (const Site& b : cert.big_sites)
    if (H.potential()[H.cube().index_of(b)] < cert.kappa) throw DomainError("V < kappa at big site " + to_string(b));

  LifshitzReport rep;
  rep.bound = principal_lower_bound(cert.kappa, 3, static_cast<double>(cert.R));
  if (H.dim() <= 2744) {
    rep.lambda_min = eigenvalues(H).back();
  } else {
    const auto r = extremal_eigs(H, 1, SpectrumEnd::low);
    rep.lambda_min = r.data.values.back() - r.max_residual;
  }
  rep.pass = rep.lambda_min >= rep.bound;

  if (with_test_function) {
    const auto tf = lifshitz_test_function(cert.cube, cert.big_sites, cert.R, cert.kappa, 3);
    const Eigen::Map<const Eigen::VectorXd> u0(tf.u0.data(), static_cast<Eigen::Index>(tf.u0.size()));
    const Eigen::VectorXd hu = H.apply(Eigen::VectorXd(u0));
    rep.test_function_built = true;
    rep.pointwise_floor = 2.0 * 3 * tf.epsilon / static_cast<double>(cert.R * cert.R * cert.R);
    rep.min_Hu0 = hu.minCoeff();
    rep.min_ratio = hu.cwiseQuotient(u0).minCoeff();
    // G carries quadrature error of order 1e-10 per value
    const double slack = 1e-8;
    rep.supersolution_ok = rep.min_Hu0 >= rep.pointwise_floor - slack && rep.min_ratio >= rep.bound - slack;
  }
  return rep;
}

NeumannBound neumann_bound(double kappa, int d, std::int64_t R, double M) {
  if (!(M >= 0.0)) throw DomainError("M must be nonnegative");
  NeumannBound nb;
  nb.g = principal_lower_bound(kappa, d, static_cast<double>(R));
  nb.q = 1.0 - nb.g / (8.0 * d + 2.0 * M);
  nb.bound.log_prefactor = std::log(2.0 / nb.g);
  nb.bound.rate = -std::log(nb.q);
  nb.bound.metric = DecayBound::Metric::l1;
  return nb;
}

DecayCheckReport neumann_decay_check(const Hamiltonian& H, double lam, double kappa, std::int64_t R, int d,
                                     double M) {
  const auto nb = neumann_bound(kappa, d, R, M);
  if (lam < 0.0 || lam > nb.g / 2.0) throw DomainError("lambda must lie in [0, c R^{-d} / 2]");
  if (H.potential_max() > M) throw DomainError("potential exceeds M");
  return check_resolvent_decay(H, lam, nb.bound);
}

std::vector<double> random_rnet_potential(const Cube& cube, std::int64_t R, double kappa, double M,
                                          std::uint64_t seed) {
  if (R < 1) throw DomainError("R must be >= 1");
  if (!(kappa > 0.0) || M < kappa) throw DomainError("need 0 < kappa <= M");
  SequentialRng rng(seed, 0x7e7);
  const auto spacing = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(2.0 * R / std::sqrt(3.0))));
  Site shift;
  for (int j = 0; j < 3; ++j) shift[j] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spacing)));
  auto mod = [](std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; };
  std::vector<double> v(cube.size());
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const Site n = cube.site_at(i);
    const bool forced = mod(n[0] - shift[0], spacing) == 0 && mod(n[1] - shift[1], spacing) == 0 &&
                        mod(n[2] - shift[2], spacing) == 0;
    const double r = rng.uniform();
    if (forced) {
      v[i] = kappa + (M - kappa) * rng.uniform();
    } else if (r < 0.5) {
      v[i] = 0.0;
    } else if (r < 0.9) {
      v[i] = kappa * rng.uniform();
    } else {
      v[i] = kappa;
    }
  }
  // near the faces the sublattice can fall outside the cube; promote the worst
  // covered site until the net property holds
  for (;;) {
    std::vector<Site> big;
    for (std::size_t i = 0; i < cube.size(); ++i)
      if (v[i] >= kappa) big.push_back(cube.site_at(i));
    const auto chk = check_rnet(cube, big, R);
    if (chk.ok) break;
    v[cube.index_of(chk.worst)] = kappa;
  }
  return v;
}

}  // namespace anderson
