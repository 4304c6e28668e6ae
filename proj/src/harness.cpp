#include "anderson/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "anderson/combinatorics.hpp"
#include "anderson/error.hpp"
#include "anderson/initial_scale.hpp"
#include "anderson/msa.hpp"
#include "anderson/operators.hpp"
#include "anderson/rng.hpp"
#include "anderson/wegner.hpp"

namespace anderson {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KindEntry {
  ExperimentKind kind;
  const char* name;
};

constexpr KindEntry kKinds[] = {
    {ExperimentKind::spectrum, "spectrum"},   {ExperimentKind::lifshitz, "lifshitz"},
    {ExperimentKind::wegner_mc, "wegner-mc"}, {ExperimentKind::dynloc, "dynloc"},
    {ExperimentKind::decompose, "decompose"}, {ExperimentKind::sperner, "sperner"},
    {ExperimentKind::cone_check, "cone-check"}, {ExperimentKind::annulus, "annulus"},
    {ExperimentKind::msa_plan, "msa-plan"},   {ExperimentKind::combine, "combine"},
};

// Reads parameters with defaults and range checks, recording the filled values.
class Params {
 public:
  explicit Params(const Json& in) : in_(in) {
    if (!in_.is_object()) throw ConfigError("params must be an object");
  }

  double real(const std::string& k, std::optional<double> def, double lo = -kInf, double hi = kInf,
              bool open_lo = false) {
    const Json* v = find(k);
    double x;
    if (!v) {
      if (!def) throw ConfigError("missing parameter '" + k + "'");
      x = *def;
    } else {
      if (!v->is_number()) throw ConfigError("parameter '" + k + "' must be a number");
      x = v->get<double>();
    }
    if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo))
      throw ConfigError("parameter '" + k + "' out of range");
    out_[k] = x;
    return x;
  }

  std::int64_t integer(const std::string& k, std::optional<std::int64_t> def, std::int64_t lo, std::int64_t hi) {
    const Json* v = find(k);
    std::int64_t x;
    if (!v) {
      if (!def) throw ConfigError("missing parameter '" + k + "'");
      x = *def;
    } else {
      if (!v->is_number_integer()) throw ConfigError("parameter '" + k + "' must be an integer");
      x = v->get<std::int64_t>();
    }
    if (x < lo || x > hi) throw ConfigError("parameter '" + k + "' out of range");
    out_[k] = x;
    return x;
  }

  std::vector<std::int64_t> int_list(const std::string& k, std::vector<std::int64_t> def, std::int64_t lo,
                                     std::int64_t hi) {
    const Json* v = find(k);
    std::vector<std::int64_t> xs = def;
    if (v) {
      xs.clear();
      if (v->is_number_integer()) xs.push_back(v->get<std::int64_t>());
      else if (v->is_array())
        for (const auto& e : *v) {
          if (!e.is_number_integer()) throw ConfigError("parameter '" + k + "' must hold integers");
          xs.push_back(e.get<std::int64_t>());
        }
      else throw ConfigError("parameter '" + k + "' must be an integer list");
    }
    if (xs.empty()) throw ConfigError("parameter '" + k + "' is empty");
    for (auto x : xs)
      if (x < lo || x > hi) throw ConfigError("parameter '" + k + "' out of range");
    out_[k] = xs;
    return xs;
  }

  std::vector<double> real_list(const std::string& k, std::vector<double> def, double lo, double hi) {
    const Json* v = find(k);
    std::vector<double> xs = def;
    if (v) {
      xs.clear();
      if (v->is_number()) xs.push_back(v->get<double>());
      else if (v->is_array())
        for (const auto& e : *v) {
          if (!e.is_number()) throw ConfigError("parameter '" + k + "' must hold numbers");
          xs.push_back(e.get<double>());
        }
      else throw ConfigError("parameter '" + k + "' must be a number list");
    }
    if (xs.empty()) throw ConfigError("parameter '" + k + "' is empty");
    for (auto x : xs)
      if (!(x >= lo && x <= hi)) throw ConfigError("parameter '" + k + "' out of range");
    out_[k] = xs;
    return xs;
  }

  std::string choice(const std::string& k, const std::string& def, std::initializer_list<const char*> options) {
    const Json* v = find(k);
    std::string x = def;
    if (v) {
      if (!v->is_string()) throw ConfigError("parameter '" + k + "' must be a string");
      x = v->get<std::string>();
    }
    bool ok = false;
    for (const char* o : options) ok = ok || x == o;
    if (!ok) throw ConfigError("parameter '" + k + "' has unknown value '" + x + "'");
    out_[k] = x;
    return x;
  }

  bool flag(const std::string& k, bool def) {
    const Json* v = find(k);
    bool x = def;
    if (v) {
      if (!v->is_boolean()) throw ConfigError("parameter '" + k + "' must be a boolean");
      x = v->get<bool>();
    }
    out_[k] = x;
    return x;
  }

  Json raw(const std::string& k) {
    const Json* v = find(k);
    if (!v) throw ConfigError("missing parameter '" + k + "'");
    return *v;
  }

  void put(const std::string& k, Json v) { out_[k] = std::move(v); }

  Json finish() {
    for (const auto& [k, v] : in_.items())
      if (!used_.count(k)) throw ConfigError("unknown parameter '" + k + "'");
    return out_;
  }

 private:
  const Json* find(const std::string& k) {
    used_.insert(k);
    auto it = in_.find(k);
    return it == in_.end() ? nullptr : &*it;
  }

  const Json& in_;
  Json out_ = Json::object();
  std::set<std::string> used_;
};

bool needs_field(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::spectrum:
    case ExperimentKind::wegner_mc:
    case ExperimentKind::dynloc:
    case ExperimentKind::cone_check:
    case ExperimentKind::annulus:
    case ExperimentKind::combine: return true;
    default: return false;
  }
}

Json validate_params(ExperimentKind kind, const Json& in) {
  Params p(in);
  switch (kind) {
    case ExperimentKind::spectrum:
      p.integer("radius", std::nullopt, 0, 22);
      p.integer("count", 0, 0, 100000);
      p.choice("end", "low", {"low", "high"});
      break;
    case ExperimentKind::lifshitz: {
      p.int_list("L", {12}, 1, 22);
      p.int_list("R", {2, 3, 4}, 1, 64);
      const auto kappas = p.real_list("kappa", {0.5, 1.0}, 1e-6, 1.0);
      p.real("M", 1.0, *std::max_element(kappas.begin(), kappas.end()), 1e6);
      p.integer("instances", 1, 1, 100000);
      p.flag("neumann", false);
      break;
    }
    case ExperimentKind::wegner_mc: {
      p.int_list("L", {6, 8, 10, 12}, 0, 22);
      p.real("Ebar", 0.05);
      const Json* thr = in.contains("log_threshold") ? &in.at("log_threshold") : nullptr;
      if (thr && thr->is_string()) p.choice("log_threshold", "sqrt_L", {"sqrt_L"});
      else if (thr) p.real("log_threshold", std::nullopt);
      else p.choice("log_threshold", "sqrt_L", {"sqrt_L"});
      p.integer("trials", std::nullopt, 1, 100000000);
      break;
    }
    case ExperimentKind::dynloc:
      p.integer("radius", std::nullopt, 0, 22);
      p.real("E0", 0.1);
      p.real("b", 1.0, 0.0);
      p.real("s", 0.1, 0.0, 1.0, true);
      p.integer("realizations", 1, 1, 1000000);
      p.real("t_max", 1000.0, 0.0, kInf, true);
      p.integer("grid_points", 10000, 1, 100000000);
      p.integer("random_times", 1000, 0, 100000000);
      break;
    case ExperimentKind::decompose: {
      const auto law = distribution_from_json(p.raw("distribution"));
      p.put("distribution", distribution_to_json(law));
      p.real("M", std::nullopt, 0.0, kInf, true);
      p.real("sigma2", variance_certificate(law), 0.0, kInf, true);
      break;
    }
    case ExperimentKind::sperner: {
      const auto N = p.integer("N", std::nullopt, 1, kExactWitnessGround);
      const auto family = p.choice("family", "slice", {"slice", "random"});
      if (family == "slice") p.integer("k", N / 2, 0, N);
      else {
        p.integer("count", std::nullopt, 1, std::int64_t{1} << N);
        p.real("density", 0.5, 0.0, 1.0);
      }
      const auto ps = p.real_list("p", {0.5}, 1e-12, 1.0 - 1e-12);
      if (ps.size() != 1 && static_cast<std::int64_t>(ps.size()) != N)
        throw ConfigError("parameter 'p' needs one value or N values");
      p.real("C", 8.0, 0.0, kInf, true);
      break;
    }
    case ExperimentKind::cone_check:
      p.integer("radius", std::nullopt, 1, 12);
      p.integer("realizations", 1, 1, 100000);
      p.integer("eigenpairs", 10, 1, 100000);
      p.integer("kmax", 4, 1, 64);
      if (in.contains("K")) p.real("K", std::nullopt, 0.0, kInf, true);
      break;
    case ExperimentKind::annulus:
      p.integer("radius", std::nullopt, 0, 22);
      p.real("Ebar", std::nullopt);
      {
        const double s = p.real("s_ell", std::nullopt, 0.0);
        p.real("s_next", std::nullopt, s);
      }
      break;
    case ExperimentKind::msa_plan: {
      const double eps = p.real("epsilon", std::nullopt, 0.0, 1.0 / 12.0, true);
      const double delta = p.real("delta", std::nullopt, 0.0, kInf, true);
      p.real("delta_prime", std::nullopt, delta, kInf, true);
      const auto L0 = p.integer("L0", 1024, 2, std::int64_t{1} << 40);
      if (!is_power_of_two(L0)) throw ConfigError("L0 must be a power of two");
      p.integer("count", 10, 1, 64);
      p.real("m0", 1.0, 0.0, 1.0, true);
      p.real("kappa", 1.0, 0.0, 1.0, true);
      if (p.real("kappa", 1.0) - 49.0 * eps <= 0.0) throw ConfigError("epsilon too large for kappa");
      break;
    }
    case ExperimentKind::combine: {
      const auto radius = p.integer("radius", 16, 2, 22);
      const auto scale = p.integer("scale", 8, 1, radius - 1);
      if (!is_power_of_two(scale)) throw ConfigError("scale must be a power of two");
      p.real("Ebar", 0.1);
      const double nu = p.real("nu", 0.04, 0.0, 1.0, true);
      const double nu_prime = p.real("nu_prime", 0.049, nu, 1.0, true);
      p.real("m", 1.0, 0.0, kInf, true);
      p.real("witness_fraction", 0.125, 0.0, 1.0);
      try {
        CombineScales::between(static_cast<double>(radius), static_cast<double>(scale), nu, nu_prime);
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
      break;
    }
  }
  return p.finish();
}

Cube origin_cube(const Json& params) { return Cube({0, 0, 0}, params.at("radius").get<std::int64_t>()); }

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

void run_spectrum(const PotentialField& field, const Json& P, std::uint64_t seed, ResultRecord& r) {
  const Cube cube = origin_cube(P);
  const auto H = assemble(cube, sample_potential(field, cube, seed));
  const auto count = static_cast<std::size_t>(P.at("count").get<std::int64_t>());
  std::vector<double> vals;
  if (count == 0 || count >= H.dim()) {
    vals = eigenvalues(H);
  } else {
    const auto end = P.at("end").get<std::string>() == "low" ? SpectrumEnd::low : SpectrumEnd::high;
    vals = extremal_eigs(H, count, end).data.values;
  }
  std::sort(vals.begin(), vals.end());
  Table t{{"index", "eigenvalue"}, {}};
  for (std::size_t i = 0; i < vals.size(); ++i) t.rows.push_back({fmt(i), fmt(vals[i])});
  r.tables["eigenvalues"] = std::move(t);
  r.scalars["dim"] = H.dim();
  r.scalars["count"] = vals.size();
  r.scalars["lambda_min"] = vals.front();
  r.scalars["lambda_max"] = vals.back();
}

void run_lifshitz(const Json& P, std::uint64_t seed, ResultRecord& r) {
  const double M = P.at("M").get<double>();
  const auto instances = P.at("instances").get<std::int64_t>();
  const bool neumann = P.at("neumann").get<bool>();
  Table t{{"L", "R", "kappa", "instance", "lambda_min", "bound", "pass"}, {}};
  if (neumann) t.header.insert(t.header.end(), {"neumann_violations", "neumann_pass"});
  std::size_t failures = 0, row = 0;
  for (auto L : P.at("L").get<std::vector<std::int64_t>>())
    for (auto R : P.at("R").get<std::vector<std::int64_t>>())
      for (double kappa : P.at("kappa").get<std::vector<double>>())
        for (std::int64_t i = 0; i < instances; ++i, ++row) {
          const Cube cube({0, 0, 0}, L);
          const auto H = assemble(cube, random_rnet_potential(cube, R, kappa, M, derive_seed(seed, row)));
          const auto cert = make_rnet_certificate(H, kappa, R);
          const auto rep = verify_lifshitz(H, cert, false);
          bool pass = rep.pass;
          std::vector<std::string> cells{fmt(L), fmt(R), fmt(kappa), fmt(i), fmt(rep.lambda_min), fmt(rep.bound),
                                         rep.pass ? "1" : "0"};
          if (neumann) {
            const auto nb = neumann_bound(kappa, 3, R, M);
            const auto d = neumann_decay_check(H, nb.g / 2.0, kappa, R, 3, M);
            cells.push_back(fmt(d.violation_count));
            cells.push_back(d.violation_count == 0 ? "1" : "0");
            pass = pass && d.violation_count == 0;
          }
          failures += !pass;
          t.rows.push_back(std::move(cells));
        }
  r.tables["lifshitz"] = std::move(t);
  r.scalars["instances"] = row;
  r.scalars["failures"] = failures;
  if (failures) r.finding = std::to_string(failures) + " instance(s) violate the principal eigenvalue bound";
}

void run_wegner(const PotentialField& field, const Json& P, std::uint64_t seed, ResultRecord& r) {
  const double Ebar = P.at("Ebar").get<double>();
  const auto trials = static_cast<std::size_t>(P.at("trials").get<std::int64_t>());
  const Json& thr = P.at("log_threshold");
  Table t{{"L", "trials", "hits", "p_hat", "ci_lo", "ci_hi", "log_threshold"}, {}};
  Json estimates = Json::array();
  bool trend_ok = true;
  std::optional<ProportionEstimate> prev;
  for (auto L : P.at("L").get<std::vector<std::int64_t>>()) {
    const double lt = thr.is_string() ? std::sqrt(static_cast<double>(L)) : thr.get<double>();
    const auto e = wegner_mc(field, Cube({0, 0, 0}, L), Ebar, lt, trials, derive_seed(seed, static_cast<std::uint64_t>(L)));
    if (prev && e.p_hat > prev->p_hat && e.lo > prev->hi) trend_ok = false;
    prev = e;
    t.rows.push_back({fmt(L), fmt(e.trials), fmt(e.hits), fmt(e.p_hat), fmt(e.lo), fmt(e.hi), fmt(lt)});
    estimates.push_back({{"L", L}, {"hits", e.hits}, {"p_hat", e.p_hat}, {"ci", {e.lo, e.hi}}});
  }
  r.tables["wegner"] = std::move(t);
  r.scalars["estimates"] = estimates;
  r.scalars["nonincreasing_within_ci"] = trend_ok;
}

void run_dynloc(const PotentialField& field, const Json& P, std::uint64_t seed, ResultRecord& r) {
  const Cube cube = origin_cube(P);
  DynlocOptions opt;
  opt.t_max = P.at("t_max").get<double>();
  opt.grid_points = static_cast<int>(P.at("grid_points").get<std::int64_t>());
  opt.random_times = static_cast<int>(P.at("random_times").get<std::int64_t>());
  opt.seed = seed;
  const auto times = default_time_grid(opt);
  const double E0 = P.at("E0").get<double>(), b = P.at("b").get<double>(), s = P.at("s").get<double>();
  const auto n = P.at("realizations").get<std::int64_t>();
  Table t{{"realization", "moment"}, {}};
  double sum = 0.0, mx = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto H = assemble(cube, sample_potential(field, cube, seed, static_cast<std::uint64_t>(i) + 1));
    const double m = dynloc_moment(H, E0, b, s, times);
    sum += m;
    mx = std::max(mx, m);
    t.rows.push_back({fmt(i), fmt(m)});
  }
  r.tables["dynloc"] = std::move(t);
  r.scalars["mean"] = sum / static_cast<double>(n);
  r.scalars["max"] = mx;
  r.scalars["finite"] = std::isfinite(sum);
}

void run_decompose(const Json& P, ResultRecord& r) {
  const auto law = distribution_from_json(P.at("distribution"));
  const auto c = decompose_with_certificate(law, P.at("M").get<double>(), P.at("sigma2").get<double>());
  r.scalars["ok"] = c.ok;
  r.scalars["in_regime"] = c.in_regime;
  r.scalars["candidates_tried"] = c.candidates_tried;
  if (!c.ok) {
    r.scalars["failure"] = c.failure;
    return;
  }
  const auto dist = verify_decomposition(c.decomposition, law);
  r.scalars["p"] = c.decomposition.p;
  r.scalars["iota"] = c.decomposition.iota;
  r.scalars["distance"] = dist.distance;
  r.scalars["distance_kind"] = dist.atomic ? "total-variation" : "cdf-sup";
  r.scalars["p_floor"] = c.p_floor;
  r.scalars["iota_floor"] = c.iota_floor;
  r.scalars["p_bound_ok"] = c.p_bound_ok;
  r.scalars["iota_bound_ok"] = c.iota_bound_ok;
  if (c.in_regime && !(c.p_bound_ok && c.iota_bound_ok)) r.finding = "decomposition misses the quantitative floors";
  Table t{{"t", "Y", "Z"}, {}};
  for (int i = 1; i < 100; ++i) {
    const double tt = i / 100.0;
    t.rows.push_back({fmt(tt), fmt(c.decomposition.Y(tt)), fmt(c.decomposition.Z(tt))});
  }
  r.tables["decomposition"] = std::move(t);
}

void run_sperner(const Json& P, std::uint64_t seed, ResultRecord& r) {
  const int N = static_cast<int>(P.at("N").get<std::int64_t>());
  const auto family = P.at("family").get<std::string>() == "slice"
                          ? slice_family(N, static_cast<int>(P.at("k").get<std::int64_t>()))
                          : random_family(N, static_cast<int>(P.at("count").get<std::int64_t>()),
                                          P.at("density").get<double>(), seed);
  auto ps = P.at("p").get<std::vector<double>>();
  if (ps.size() == 1) ps.assign(static_cast<std::size_t>(N), ps.front());
  const BernoulliEnsemble ens(ps);
  const auto w = find_witness(family);
  const double prob = family_probability(family, ens);
  r.scalars["members"] = family.members.size();
  r.scalars["kappa"] = w.kappa;
  r.scalars["exact_witness"] = w.exact;
  r.scalars["probability"] = prob;
  r.scalars["beta"] = ens.beta();
  if (w.kappa <= 0.0) {
    r.scalars["applicable"] = false;
    return;
  }
  const double C = P.at("C").get<double>();
  const double unit = sperner_bound(ens.beta(), w.kappa, N, 1.0);
  r.scalars["applicable"] = true;
  r.scalars["bound"] = C * unit;
  r.scalars["minimal_C"] = prob / unit;
  r.scalars["holds"] = prob <= C * unit;
  if (prob > C * unit) r.finding = "family probability exceeds the bound";
}

void run_cone(const PotentialField& field, const Json& P, std::uint64_t seed, ResultRecord& r) {
  const Cube cube = origin_cube(P);
  const double K = P.contains("K") ? P.at("K").get<double>() : field.M() + 12.0;
  const auto kmax = P.at("kmax").get<std::int64_t>();
  const auto pairs = static_cast<std::size_t>(P.at("eigenpairs").get<std::int64_t>());
  Table t{{"realization", "index", "eigenvalue", "cases", "failures"}, {}};
  std::size_t cases = 0, failures = 0;
  const auto sites = cube_sites(cube);
  for (std::int64_t real = 0; real < P.at("realizations").get<std::int64_t>(); ++real) {
    const auto H = assemble(cube, sample_potential(field, cube, seed, static_cast<std::uint64_t>(real) + 1));
    EigenData eig;
    std::vector<std::size_t> chosen;
    if (H.dim() <= 2744) {
      eig = eigendecompose(H);
      const std::size_t take = std::min(pairs, eig.count());
      for (std::size_t j = 0; j < take; ++j) chosen.push_back(j * eig.count() / take);
    } else {
      eig = extremal_eigs(H, std::min(pairs, H.dim()), SpectrumEnd::low).data;
      for (std::size_t j = 0; j < eig.count(); ++j) chosen.push_back(j);
    }
    for (std::size_t idx : chosen) {
      const Eigen::VectorXd u = eig.vectors.col(static_cast<Eigen::Index>(idx));
      std::size_t c = 0, f = 0;
      for (const Site& apex : sites)
        for (int axis = 0; axis < kDim; ++axis)
          for (int sign : {-1, 1})
            for (std::int64_t k = 1; k <= kmax; ++k) {
              if (cone_layer({apex, axis, sign}, k, cube).empty()) continue;
              ++c;
              try {
                cone_descent(u, K, apex, axis, sign, static_cast<int>(k), cube);
              } catch (const FindingError&) {
                ++f;
              }
            }
      cases += c;
      failures += f;
      t.rows.push_back({fmt(real), fmt(idx), fmt(eig.values[idx]), fmt(c), fmt(f)});
    }
  }
  r.tables["cone"] = std::move(t);
  r.scalars["K"] = K;
  r.scalars["cases"] = cases;
  r.scalars["failures"] = failures;
  if (failures) r.finding = std::to_string(failures) + " cone descent case(s) found no qualifying site";
}

void run_annulus(const PotentialField& field, const Json& P, std::uint64_t seed, ResultRecord& r) {
  const Cube cube = origin_cube(P);
  const auto eigs = eigenvalues(assemble(cube, sample_potential(field, cube, seed)));
  const double Ebar = P.at("Ebar").get<double>(), s = P.at("s_ell").get<double>(), sn = P.at("s_next").get<double>();
  const int dim = static_cast<int>(eigs.size());
  Table t{{"k1", "k2"}, {}};
  for (int k1 = 1; k1 <= dim; ++k1)
    for (int k2 = k1; k2 <= dim; ++k2)
      if (annulus_event_holds(eigs, Ebar, AnnulusEvent(k1, k2, 0, s, sn))) t.rows.push_back({fmt(std::int64_t{k1}), fmt(std::int64_t{k2})});
  r.scalars["events"] = t.rows.size();
  r.scalars["predicate"] = annulus_predicate(eigs, Ebar, s, sn);
  r.tables["events"] = std::move(t);
}

void run_msa(const Json& P, ResultRecord& r) {
  const double eps = P.at("epsilon").get<double>();
  const double delta = P.at("delta").get<double>(), dp = P.at("delta_prime").get<double>();
  const auto L0 = P.at("L0").get<std::int64_t>();
  const int l0 = static_cast<int>(std::log2(static_cast<double>(L0)));
  const auto s = plan_schedule(eps, delta, dp, l0, static_cast<std::size_t>(P.at("count").get<std::int64_t>()),
                               P.at("m0").get<double>());
  const auto f = final_params(P.at("kappa").get<double>(), eps, P.at("m0").get<double>(), dp, delta, s.log2_L);
  r.scalars["epsilon"] = eps;
  r.scalars["delta"] = delta;
  r.scalars["delta_prime"] = dp;
  r.scalars["L"] = s.L;
  r.scalars["m"] = s.decay.m;
  r.scalars["m_star"] = s.decay.m_star;
  r.scalars["kappa_star"] = f.kappa_star;
  r.scalars["eps_star"] = f.eps_star;
  r.scalars["floor_identity_ok"] = s.first_identity_failure < 0;
  r.scalars["decay_floor_ok"] = s.decay.floor_ok();
  r.scalars["first_decay_floor_failure"] = s.decay.first_floor_failure;
  r.scalars["ordering_ok"] = s.ordering_ok;
  Table t{{"k", "log2_L", "L", "m"}, {}};
  for (std::size_t k = 0; k < s.L.size(); ++k)
    t.rows.push_back({fmt(k), fmt(std::int64_t{s.log2_L[k]}), fmt(s.L[k]), fmt(s.decay.m[k])});
  r.tables["schedule"] = std::move(t);
  if (!s.decay.m_star_positive()) r.finding = "limit decay rate m_star is not positive";
}

void run_combine(const PotentialField& field, const Json& P, std::uint64_t seed, ResultRecord& r) {
  const Cube target = origin_cube(P);
  const auto scale = P.at("scale").get<std::int64_t>();
  const auto H = assemble(target, sample_potential(field, target, seed));
  std::vector<Cube> cover;
  for (const Cube& c : dyadic_cover(target, scale))
    if (target.contains(c)) cover.push_back(c);
  const auto scales = CombineScales::between(static_cast<double>(target.radius()), static_cast<double>(scale),
                                             P.at("nu").get<double>(), P.at("nu_prime").get<double>());
  const auto rep = combine_resolvents(H, P.at("Ebar").get<double>(), cover, scales, P.at("m").get<double>(),
                                      P.at("witness_fraction").get<double>() * static_cast<double>(scale));
  r.scalars["subcubes"] = rep.subcubes;
  r.scalars["m_tilde"] = rep.m_tilde;
  r.scalars["gate_violations"] = rep.gate_violations;
  r.scalars["uncovered_sites"] = rep.uncovered_sites;
  r.scalars["hypotheses_ok"] = rep.hypotheses_ok;
  r.scalars["asserted"] = rep.asserted;
  if (rep.asserted) {
    r.scalars["target_violations"] = rep.target.violation_count;
    r.scalars["target_method"] = rep.target.method;
    r.scalars["target_worst_log_ratio"] = rep.target.worst_log_ratio;
    if (rep.target.violation_count) r.finding = "target resolvent exceeds the combined bound";
  }
}

}  // namespace

const char* kind_name(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "unknown";
}

ExperimentKind kind_from_name(const std::string& name) {
  for (const auto& e : kKinds)
    if (name == e.name) return e.kind;
  throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::parse(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (k != "schema_version" && k != "experiment" && k != "seed" && k != "field" && k != "field_file" &&
        k != "params")
      throw ConfigError("unknown config key '" + k + "'");
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw ConfigError("unsupported schema_version");
  if (!j.contains("experiment") || !j.at("experiment").is_string()) throw ConfigError("config lacks 'experiment'");
  ExperimentConfig c;
  c.kind_ = kind_from_name(j.at("experiment").get<std::string>());
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() >= 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed_ = j.at("seed").get<std::uint64_t>();
  }
  c.echo_ = Json{{"schema_version", kSchemaVersion}, {"experiment", kind_name(c.kind_)}, {"seed", c.seed_}};
  if (needs_field(c.kind_)) {
    Json fj;
    if (j.contains("field") && j.contains("field_file")) throw ConfigError("give either 'field' or 'field_file'");
    if (j.contains("field")) fj = j.at("field");
    else if (j.contains("field_file")) {
      try {
        fj = Json::parse(read_text(j.at("field_file").get<std::string>()));
      } catch (const Json::exception& e) {
        throw ConfigError(std::string("bad field file: ") + e.what());
      }
    } else throw ConfigError("experiment needs a 'field'");
    c.echo_["field"] = field_to_json(field_from_json(fj));
  } else if (j.contains("field") || j.contains("field_file")) {
    throw ConfigError("experiment takes no field");
  }
  c.echo_["params"] = validate_params(c.kind_, j.value("params", Json::object()));
  return c;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse(j);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return parse_text(read_text(path)); }

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed_ = s;
  echo_["seed"] = s;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(echo_.dump()); }

Json ResultRecord::scalars_json() const {
  Json s = Json::object();
  for (const auto& [k, v] : scalars) s[k] = v;
  return s;
}

Json ResultRecord::to_json() const {
  Json tables_j = Json::object();
  for (const auto& [name, t] : tables) tables_j[name] = Json{{"columns", t.header}, {"rows", t.rows.size()}};
  Json j{{"schema_version", kSchemaVersion},
         {"tool_version", ANDERSON_VERSION},
         {"config", config},
         {"config_hash", config_hash},
         {"scalars", scalars_json()},
         {"tables", tables_j},
         {"wall_seconds", wall_seconds}};
  if (!finding.empty()) j["finding"] = finding;
  return j;
}

ResultRecord run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord r;
  r.config = config.echo();
  r.config_hash = config.hash();
  const Json& P = config.echo().at("params");
  const std::uint64_t seed = config.seed();
  std::optional<PotentialField> field;
  if (config.echo().contains("field")) field.emplace(field_from_json(config.echo().at("field")));
  switch (config.kind()) {
    case ExperimentKind::spectrum: run_spectrum(*field, P, seed, r); break;
    case ExperimentKind::lifshitz: run_lifshitz(P, seed, r); break;
    case ExperimentKind::wegner_mc: run_wegner(*field, P, seed, r); break;
    case ExperimentKind::dynloc: run_dynloc(*field, P, seed, r); break;
    case ExperimentKind::decompose: run_decompose(P, r); break;
    case ExperimentKind::sperner: run_sperner(P, seed, r); break;
    case ExperimentKind::cone_check: run_cone(*field, P, seed, r); break;
    case ExperimentKind::annulus: run_annulus(*field, P, seed, r); break;
    case ExperimentKind::msa_plan: run_msa(P, r); break;
    case ExperimentKind::combine: run_combine(*field, P, seed, r); break;
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string write_record(const ResultRecord& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir);
  const std::string stem = r.config.at("experiment").get<std::string>() + "-" + r.config_hash;
  Json j = r.to_json();
  for (const auto& [name, t] : r.tables) {
    const std::string file = stem + "-" + name + ".csv";
    write_text((fs::path(dir) / file).string(), to_csv(t));
    j["tables"][name]["file"] = file;
  }
  const std::string path = (fs::path(dir) / (stem + ".json")).string();
  write_text(path, j.dump(2) + "\n");
  return path;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x9e3779b97f4a7c15ull));
}

int error_class(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 2;
  if (dynamic_cast<const NumericError*>(&e)) return 3;
  if (dynamic_cast<const FindingError*>(&e)) return 4;
  return 1;
}

std::vector<SweepItem> sweep(std::vector<ExperimentConfig> configs, unsigned threads,
                             std::optional<std::uint64_t> master_seed) {
  if (master_seed)
    for (std::size_t i = 0; i < configs.size(); ++i) configs[i].set_seed(derive_seed(*master_seed, i));
  std::vector<SweepItem> out(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        out[i].record = run(configs[i]);
      } catch (const std::exception& e) {
        out[i].error = e.what();
        out[i].error_class = error_class(e);
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace anderson
