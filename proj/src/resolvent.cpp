#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "anderson/operators.hpp"
#include "anderson/rng.hpp"

namespace anderson {

struct Resolvent::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

Resolvent::Resolvent(const Hamiltonian& H, double E) : impl_(std::make_unique<Impl>()), H_(H) {
  const Eigen::SparseMatrix<double> A = H.sparse(E);
  impl_->lu.analyzePattern(A);
  impl_->lu.factorize(A);
  if (impl_->lu.info() != Eigen::Success)
    throw NumericError("spectral collision: (H - E) is singular to working precision", 0.0);
  const double norm = norm_estimate(8);
  const double dist = 1.0 / norm;
  if (!(dist > kCollisionTol * std::max(1.0, H.norm_bound())))
    throw NumericError("spectral collision: estimated distance to spectrum " + std::to_string(dist), dist);
}

Resolvent::~Resolvent() = default;

Eigen::VectorXd Resolvent::column(std::size_t j) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(H_.dim()));
  e(static_cast<Eigen::Index>(j)) = 1.0;
  return impl_->lu.solve(e);
}

double Resolvent::entry(const Site& x, const Site& y) const {
  const std::size_t ix = H_.cube().index_of(x);
  const std::size_t iy = H_.cube().index_of(y);
  return column(iy)(static_cast<Eigen::Index>(ix));
}

double Resolvent::norm_estimate(int iterations) const {
  const auto n = static_cast<Eigen::Index>(H_.dim());
  SequentialRng rng(0x0123, H_.dim());
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  v.normalize();
  double est = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Eigen::VectorXd w = impl_->lu.solve(v);
    const double nw = w.norm();
    if (!std::isfinite(nw)) return std::numeric_limits<double>::infinity();
    est = std::max(est, nw);
    v = w / nw;
  }
  return est;
}

double resolvent_entry(const Hamiltonian& H, double E, const Site& x, const Site& y) {
  Resolvent R(H, E);
  return R.entry(x, y);
}

double resolvent_norm_from_eigs(const std::vector<double>& eigs, double E) {
  double dist = std::numeric_limits<double>::infinity();
  for (double e : eigs) dist = std::min(dist, std::abs(e - E));
  if (!(dist > kCollisionTol)) throw NumericError("spectral collision at E = " + std::to_string(E), dist);
  return 1.0 / dist;
}

ResolventNorm resolvent_norm(const Hamiltonian& H, double E, std::size_t dense_cap) {
  ResolventNorm out;
  if (H.dim() <= dense_cap) {
    out.norm = resolvent_norm_from_eigs(eigenvalues(H, dense_cap), E);
    out.distance = 1.0 / out.norm;
    out.dense = true;
    return out;
  }
  out.dense = false;
  std::size_t count = 1;
  while (true) {
    const ExtremalResult r = extremal_eigs(H, count, SpectrumEnd::low);
    const auto& vals = r.data.values;  // decreasing; front is the largest found
    if (vals.front() > E || count >= H.dim()) {
      out.norm = resolvent_norm_from_eigs(vals, E);
      out.distance = 1.0 / out.norm;
      return out;
    }
    if (count >= 64) {
      if (H.dim() <= kDefaultDenseCap) {
        out.norm = resolvent_norm_from_eigs(eigenvalues(H), E);
        out.distance = 1.0 / out.norm;
        out.dense = true;
        return out;
      }
      throw NumericError("energy lies too deep in the spectrum for the iterative norm path");
    }
    count *= 2;
  }
}

double DecayBound::log_bound(const Site& a, const Site& b) const {
  const Site d = a - b;
  const double dist = metric == Metric::l1 ? static_cast<double>(norm1(d)) : norm2(d);
  return log_prefactor - rate * dist;
}

DecayCheckReport check_resolvent_decay(const Hamiltonian& H, double E, const DecayBound& bound,
                                       std::size_t max_reported) {
  DecayCheckReport rep;
  const std::size_t n = H.dim();
  const Cube& cube = H.cube();
  const bool small = n <= 2744;
  if (small) {
    rep.lambda_min = eigenvalues(H).back();
  } else {
    // Ritz values sit above the true eigenvalue; back off by the residual
    const auto r = extremal_eigs(H, 1, SpectrumEnd::low);
    rep.lambda_min = r.data.values.back() - r.max_residual;
  }
  const bool definite = E < rep.lambda_min;
  if (definite) {
    rep.norm = 1.0 / (rep.lambda_min - E);
  } else {
    rep.norm = resolvent_norm(H, E).norm;
  }
  const double span = static_cast<double>(cube.side() - 1);
  const double maxdist = bound.metric == DecayBound::Metric::l1 ? 3.0 * span : std::sqrt(3.0) * span;
  const double min_log_bound = bound.log_prefactor - std::max(bound.rate, 0.0) * maxdist;
  if (std::log(rep.norm) <= min_log_bound) {
    rep.norm_certified = true;
    rep.entries_checked = n * n;
    rep.worst_log_ratio = std::log(rep.norm) - min_log_bound;
    rep.method = "norm-certificate";
    return rep;
  }

  auto check_column = [&](std::size_t j, const Eigen::VectorXd& col) {
    const Site b = cube.site_at(j);
    for (std::size_t i = 0; i < n; ++i) {
      const Site a = cube.site_at(i);
      const double v = std::abs(col(static_cast<Eigen::Index>(i)));
      const double lb = bound.log_bound(a, b);
      const double lr = (v > 0.0 ? std::log(v) : -1e300) - lb;
      rep.worst_log_ratio = std::max(rep.worst_log_ratio, lr);
      ++rep.entries_checked;
      if (lr > 1e-9) {
        ++rep.violation_count;
        if (rep.violations.size() < max_reported) rep.violations.push_back({a, b, v, std::exp(lb)});
      }
    }
  };

  if (small) {
    rep.method = "dense-inverse";
    const Eigen::MatrixXd A = H.dense(E);
    const Eigen::MatrixXd inv = A.ldlt().solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
    for (std::size_t j = 0; j < n; ++j) check_column(j, inv.col(static_cast<Eigen::Index>(j)));
  } else if (definite) {
    rep.method = "cg-columns";
    const Eigen::SparseMatrix<double> A = H.sparse(E);
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-14);
    cg.setMaxIterations(static_cast<Eigen::Index>(10 * n));
    cg.compute(A);
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      e(static_cast<Eigen::Index>(j)) = 1.0;
      const Eigen::VectorXd col = cg.solve(e);
      if (cg.info() != Eigen::Success) throw NumericError("CG failed on a resolvent column", cg.error());
      check_column(j, col);
    }
  } else {
    rep.method = "lu-columns";
    Resolvent R(H, E);
    for (std::size_t j = 0; j < n; ++j) check_column(j, R.column(j));
  }
  return rep;
}

}  // namespace anderson
