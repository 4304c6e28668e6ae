#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "anderson/operators.hpp"
#include "anderson/rng.hpp"

namespace anderson {

namespace {

// Exact inverse of (-Delta_Dirichlet + c) on the cube via the separable sine basis.
class SinePreconditioner {
 public:
  SinePreconditioner(std::size_t side, double c) : s_(static_cast<Eigen::Index>(side)) {
    const double h = std::numbers::pi / static_cast<double>(side + 1);
    S_.resize(s_, s_);
    const double norm = std::sqrt(2.0 / static_cast<double>(side + 1));
    std::vector<double> lam(side);
    for (Eigen::Index j = 0; j < s_; ++j) {
      lam[static_cast<std::size_t>(j)] = 2.0 - 2.0 * std::cos(h * static_cast<double>(j + 1));
      for (Eigen::Index k = 0; k < s_; ++k)
        S_(j, k) = norm * std::sin(h * static_cast<double>((j + 1) * (k + 1)));
    }
    inv_.resize(side * side * side);
    std::size_t i = 0;
    for (std::size_t a = 0; a < side; ++a)
      for (std::size_t b = 0; b < side; ++b)
        for (std::size_t d = 0; d < side; ++d) inv_[i++] = 1.0 / (lam[a] + lam[b] + lam[d] + c);
  }

  void apply(Eigen::Ref<Eigen::VectorXd> v) const {
    transform(v.data());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= inv_[static_cast<std::size_t>(i)];
    transform(v.data());
  }

 private:
  // S is symmetric and orthogonal, so the same map goes forward and back.
  void transform(double* buf) const {
    const Eigen::Index s2 = s_ * s_;
    Eigen::Map<Eigen::MatrixXd> Mz(buf, s_, s2);
    Mz = (S_ * Mz).eval();
    for (Eigen::Index x = 0; x < s_; ++x) {
      Eigen::Map<Eigen::MatrixXd> My(buf + x * s2, s_, s_);
      My = (My * S_).eval();
    }
    Eigen::Map<Eigen::MatrixXd> Mx(buf, s2, s_);
    Mx = (Mx * S_).eval();
  }

  Eigen::Index s_;
  Eigen::MatrixXd S_;
  std::vector<double> inv_;
};

// Appends columns of C to Q (orthonormal), dropping directions that vanish.
void append_orthonormal(Eigen::MatrixXd& Q, Eigen::Index& used, const Eigen::MatrixXd& C) {
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    Eigen::VectorXd v = C.col(j);
    const double n0 = v.norm();
    if (!(n0 > 0.0) || !std::isfinite(n0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (used > 0) {
        const Eigen::VectorXd coef = Q.leftCols(used).transpose() * v;
        v.noalias() -= Q.leftCols(used) * coef;
      }
    }
    const double n1 = v.norm();
    if (n1 <= 1e-10 * n0) continue;
    Q.col(used++) = v / n1;
  }
}

ExtremalResult dense_extremal(const Hamiltonian& H, std::size_t count, SpectrumEnd which) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.dense());
  if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
  const auto n = static_cast<Eigen::Index>(H.dim());
  const auto k = static_cast<Eigen::Index>(count);
  ExtremalResult r;
  r.used_dense = true;
  r.data.vectors.resize(n, k);
  // ascending from Eigen; report decreasing
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = which == SpectrumEnd::low ? k - 1 - j : n - 1 - j;
    r.data.values.push_back(es.eigenvalues()(src));
    r.data.vectors.col(j) = es.eigenvectors().col(src);
  }
  canonicalize_eigenbasis(r.data);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::VectorXd res = H.apply(Eigen::VectorXd(r.data.vectors.col(j))) -
                                r.data.values[static_cast<std::size_t>(j)] * r.data.vectors.col(j);
    r.max_residual = std::max(r.max_residual, res.norm());
  }
  return r;
}

}  // namespace

ExtremalResult extremal_eigs(const Hamiltonian& H, std::size_t count, SpectrumEnd which, const LobpcgOptions& opt) {
  const std::size_t n = H.dim();
  if (count == 0) return {};
  if (count > n) throw DomainError("requested more eigenpairs than the dimension");
  const std::size_t extra = opt.extra_block >= 0 ? static_cast<std::size_t>(opt.extra_block)
                                                 : std::max<std::size_t>(4, count / 2);
  const std::size_t b = std::min(count + extra, n);
  if (3 * b >= n) {
    if (!opt.allow_dense_fallback) throw DomainError("block too large for the iterative solver");
    return dense_extremal(H, count, which);
  }

  const double sign = which == SpectrumEnd::low ? 1.0 : -1.0;
  std::optional<SinePreconditioner> T;
  if (which == SpectrumEnd::low && H.hopping()) {
    const auto& V = H.potential();
    const double c = std::accumulate(V.begin(), V.end(), 0.0) / static_cast<double>(V.size());
    T.emplace(static_cast<std::size_t>(H.cube().side()), std::max(c, 0.0));
  }
  auto op = [&](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
    H.apply_block(X, Y);
    if (sign < 0) Y = -Y;
  };

  const auto N = static_cast<Eigen::Index>(n);
  const auto B = static_cast<Eigen::Index>(b);
  SequentialRng rng(opt.seed, n);
  Eigen::MatrixXd X0(N, B);
  for (Eigen::Index j = 0; j < B; ++j)
    for (Eigen::Index i = 0; i < N; ++i) X0(i, j) = rng.normal();

  Eigen::MatrixXd Q(N, 3 * B), AQ, X, AX, P;
  Eigen::Index used = 0;
  append_orthonormal(Q, used, X0);
  X = Q.leftCols(used);
  op(X, AX);
  {
    Eigen::MatrixXd G = X.transpose() * AX;
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    X = X * es.eigenvectors();
    AX = AX * es.eigenvectors();
  }
  Eigen::VectorXd theta = (X.transpose() * AX).diagonal();

  ExtremalResult out;
  std::vector<double> res(b, 0.0);
  const double tol = opt.tol;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    Eigen::MatrixXd R = AX - X * theta.asDiagonal();
    double worst = 0.0;
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < B; ++j) {
      res[static_cast<std::size_t>(j)] = R.col(j).norm();
      if (static_cast<std::size_t>(j) < count) worst = std::max(worst, res[static_cast<std::size_t>(j)]);
      if (res[static_cast<std::size_t>(j)] > 0.1 * tol) active.push_back(j);
    }
    out.iterations = it;
    out.max_residual = worst;
    if (worst <= tol) break;
    if (it == opt.max_iterations)
      throw NumericError("LOBPCG did not converge; achieved residual " + std::to_string(worst), worst);

    Eigen::MatrixXd W(N, static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
      W.col(static_cast<Eigen::Index>(a)) = R.col(active[a]);
      if (T) T->apply(W.col(static_cast<Eigen::Index>(a)));
    }
    used = 0;
    append_orthonormal(Q, used, X);
    append_orthonormal(Q, used, W);
    if (P.cols() > 0) {
      Eigen::MatrixXd Pa(N, static_cast<Eigen::Index>(active.size()));
      for (std::size_t a = 0; a < active.size(); ++a) Pa.col(static_cast<Eigen::Index>(a)) = P.col(active[a]);
      append_orthonormal(Q, used, Pa);
    }
    const Eigen::MatrixXd Qu = Q.leftCols(used);
    op(Qu, AQ);
    Eigen::MatrixXd G = Qu.transpose() * AQ;
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success) throw NumericError("Rayleigh-Ritz step failed");
    const Eigen::MatrixXd C = es.eigenvectors().leftCols(B);
    X = Qu * C;
    AX = AQ * C;
    theta = es.eigenvalues().head(B);
    // search direction: the part of the new iterate outside the old X block
    const Eigen::Index nx = std::min<Eigen::Index>(B, used);
    P = Qu.rightCols(used - nx) * C.bottomRows(used - nx);
  }

  out.data.values.resize(count);
  out.data.vectors.resize(N, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    // report decreasing: low end is reversed, high end (computed on -H) is already ordered
    const std::size_t src = which == SpectrumEnd::low ? count - 1 - j : j;
    out.data.values[j] = sign * theta(static_cast<Eigen::Index>(src));
    out.data.vectors.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(src));
  }
  canonicalize_eigenbasis(out.data);
  return out;
}

double lowest_eigenvalue(const Hamiltonian& H, const LobpcgOptions& opt) {
  return extremal_eigs(H, 1, SpectrumEnd::low, opt).data.values.front();
}

}  // namespace anderson
