#include "anderson/msa.hpp"

#include <cmath>
#include <map>
#include <string>

#include "anderson/error.hpp"

namespace anderson {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 12.0)) throw DomainError("epsilon must lie in (0, 1/12)");
}

}  // namespace

bool floor_identity_holds(int l, int l_next, double epsilon) {
  const long double f = (1.0L - 6.0L * epsilon) * l_next;
  return static_cast<long long>(std::floor(f)) == l;
}

int next_scale_exponent(int l, double epsilon) {
  check_epsilon(epsilon);
  if (l < 1) throw DomainError("scale exponent must be positive");
  const long double ratio = 1.0L - 6.0L * epsilon;
  const int start = static_cast<int>(std::ceil(l / ratio)) - 1;
  for (int c = std::max(start, l); c <= start + 2; ++c)
    if (floor_identity_holds(l, c, epsilon)) return c;
  throw DomainError("no next scale for exponent " + std::to_string(l) + "; start from a larger L0");
}

std::int64_t next_scale(std::int64_t L, double epsilon) {
  if (!is_power_of_two(L) || L < 2) throw DomainError("scale must be a power of two >= 2");
  const int l = static_cast<int>(std::log2(static_cast<double>(L)));
  const int n = next_scale_exponent(l, epsilon);
  if (n > 62) throw DomainError("next scale overflows 64 bits");
  return std::int64_t{1} << n;
}

std::vector<int> scale_exponents(int l0, double epsilon, std::size_t count) {
  std::vector<int> out;
  if (count == 0) return out;
  out.push_back(l0);
  while (out.size() < count) out.push_back(next_scale_exponent(out.back(), epsilon));
  return out;
}

DecaySchedule decay_schedule(double m0, double delta_prime, double delta, const std::vector<int>& log2_L,
                             bool strict) {
  if (!(m0 > 0.0 && m0 <= 1.0)) throw DomainError("m0 must lie in (0, 1]");
  if (!(delta > 0.0 && delta_prime > delta)) throw DomainError("need delta' > delta > 0");
  DecaySchedule out;
  double m = m0;
  out.m_star = m0;
  for (std::size_t k = 0; k < log2_L.size(); ++k) {
    if (k > 0) m -= std::exp2(-delta_prime * log2_L[k - 1]);
    out.m.push_back(m);
    if (out.first_floor_failure < 0 && !(m >= std::exp2(-delta * log2_L[k]) && m <= 1.0))
      out.first_floor_failure = static_cast<int>(k);
    out.m_star -= std::exp2(-delta_prime * log2_L[k]);
  }
  if (strict && !out.floor_ok())
    throw DomainError("decay floor fails at k = " + std::to_string(out.first_floor_failure));
  if (strict && !out.m_star_positive()) throw DomainError("limit decay rate is not positive");
  return out;
}

ScaleSchedule plan_schedule(double epsilon, double delta, double delta_prime, int l0, std::size_t count, double m0) {
  check_epsilon(epsilon);
  ScaleSchedule s;
  s.epsilon = epsilon;
  s.delta = delta;
  s.delta_prime = delta_prime;
  s.ordering_ok = epsilon > delta_prime && delta_prime > delta && delta > 0.0;
  s.log2_L = scale_exponents(l0, epsilon, count);
  for (int l : s.log2_L) s.L.push_back(std::exp2(l));
  s.decay = decay_schedule(m0, delta_prime, delta, s.log2_L);
  for (std::size_t k = 0; k + 1 < s.log2_L.size(); ++k)
    if (!floor_identity_holds(s.log2_L[k], s.log2_L[k + 1], epsilon)) {
      s.first_identity_failure = static_cast<int>(k);
      break;
    }
  return s;
}

bool schedule_identities_hold(const ScaleSchedule& s) {
  if (s.L.size() != s.log2_L.size() || s.decay.m.size() != s.log2_L.size()) return false;
  for (std::size_t k = 0; k < s.log2_L.size(); ++k) {
    if (s.L[k] != std::exp2(s.log2_L[k])) return false;
    if (k + 1 < s.log2_L.size() && !floor_identity_holds(s.log2_L[k], s.log2_L[k + 1], s.epsilon)) return false;
    if (k > 0 && s.decay.m[k] != s.decay.m[k - 1] - std::pow(s.L[k - 1], -s.delta_prime)) return false;
  }
  return true;
}

FinalParams final_params(double kappa, double epsilon, double m0, double delta_prime, double delta,
                         const std::vector<int>& log2_L, double eps2_slack) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (eps2_slack < 0.0) throw DomainError("slack must be nonnegative");
  const double e2 = eps2_slack * epsilon * epsilon;
  const double num = kappa - 49.0 * epsilon - e2;
  const double den = 1.0 - 10.0 * epsilon + e2;
  if (!(num > 0.0) || !(den > 0.0)) throw DomainError("epsilon too large for kappa");
  FinalParams out;
  out.eps_star = 0.75 * epsilon;
  out.kappa_star = num / den;
  out.eps2_slack = eps2_slack;
  if (!log2_L.empty()) {
    out.decay = decay_schedule(m0, delta_prime, delta, log2_L);
    out.m_star = out.decay.m_star;
  }
  return out;
}

bool assembly_bound_weaker(double L, double r, double L_k, double m_k, double epsilon, double eps_star,
                           double m_star) {
  if (!(L >= L_k && L_k >= 1.0 && r >= 0.0)) throw DomainError("need L >= L_k >= 1 and r >= 0");
  return std::pow(L, 1.0 - eps_star) - m_star * r >= std::pow(L_k, 1.0 - epsilon) - m_k * r;
}

CombineScales::CombineScales(std::array<double, 7> ell_, double nu_, double nu_prime_)
    : ell(ell_), nu(nu_), nu_prime(nu_prime_) {
  if (!(nu > 0.0 && nu_prime > nu && nu_prime < 1.0)) throw DomainError("need 0 < nu < nu' < 1");
  for (std::size_t k = 0; k < ell.size(); ++k) {
    if (!(ell[k] > 1.0)) throw DomainError("scales must exceed 1");
    if (k + 1 < ell.size() && !(std::pow(ell[k], 1.0 - nu_prime) >= ell[k + 1] * (1.0 - 1e-12)))
      throw DomainError("scale chain fails between l" + std::to_string(k) + " and l" + std::to_string(k + 1));
  }
}

CombineScales CombineScales::between(double L, double Lk, double nu, double nu_prime) {
  if (!(L > Lk && Lk > 1.0)) throw DomainError("need L > Lk > 1");
  std::array<double, 7> ell{};
  const double a = std::log(L), b = std::log(Lk);
  for (int k = 0; k <= 5; ++k) ell[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / 5.0);
  ell[5] = Lk;
  ell[6] = std::pow(Lk, 1.0 - nu_prime);
  return CombineScales(ell, nu, nu_prime);
}

Hamiltonian restrict_to(const Hamiltonian& H, const Cube& sub) {
  if (!H.cube().contains(sub)) throw DomainError("subcube leaves the cube");
  std::vector<double> v;
  v.reserve(sub.size());
  for (const Site& s : cube_sites(sub)) v.push_back(H.potential()[H.cube().index_of(s)]);
  return Hamiltonian(sub, std::move(v), H.hopping());
}

namespace {

double m_tilde_for(const CombineScales& scales, double m) {
  const double mt = m - std::pow(scales.ell[5], -scales.nu);
  if (!(mt > 0.0)) throw DomainError("m must exceed l5^{-nu}");
  return mt;
}

}  // namespace

CombineReport combine_resolvents(const Hamiltonian& H, double Ebar, const std::vector<Cube>& cover,
                                 const CombineScales& scales, double m, double witness_distance) {
  m_tilde_for(scales, m);
  const DecayBound gate{scales.ell[6], m, DecayBound::Metric::l2};
  // translated copies with equal potentials share one report
  std::map<std::pair<std::int64_t, std::vector<double>>, DecayCheckReport> cache;
  std::vector<DecayCheckReport> reports;
  for (const Cube& c : cover) {
    const Hamiltonian sub = restrict_to(H, c);
    auto key = std::make_pair(c.radius(), sub.potential());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(std::move(key), check_resolvent_decay(sub, Ebar, gate)).first;
    reports.push_back(it->second);
  }
  return combine_resolvents(H, Ebar, cover, reports, scales, m, witness_distance);
}

CombineReport combine_resolvents(const Hamiltonian& H, double Ebar, const std::vector<Cube>& cover,
                                 const std::vector<DecayCheckReport>& subcube_reports, const CombineScales& scales,
                                 double m, double witness_distance) {
  if (subcube_reports.size() != cover.size()) throw DomainError("one subcube report per cover member");
  CombineReport rep;
  rep.m_tilde = m_tilde_for(scales, m);
  rep.subcubes = cover.size();
  const Cube& target = H.cube();
  for (const Cube& c : cover)
    if (!target.contains(c)) throw DomainError("cover member leaves the target cube");
  for (const auto& r : subcube_reports) rep.gate_violations += r.violation_count;
  for (const Site& x : cube_sites(target)) {
    bool witnessed = false;
    for (const Cube& c : cover)
      if (c.contains(x) && distance_to_complement(x, target, c) >= witness_distance) {
        witnessed = true;
        break;
      }
    if (!witnessed) ++rep.uncovered_sites;
  }
  rep.hypotheses_ok = rep.gate_violations == 0 && rep.uncovered_sites == 0;
  if (!rep.hypotheses_ok) return rep;
  rep.asserted = true;
  rep.target = check_resolvent_decay(H, Ebar, DecayBound{scales.ell[1], rep.m_tilde, DecayBound::Metric::l2});
  return rep;
}

}  // namespace anderson
