#include <algorithm>
#include <cmath>

#include "anderson/operators.hpp"
#include "anderson/rng.hpp"

namespace anderson {

ComplexVector evolve(const EigenData& eig, double t, const ComplexVector& psi0) {
  const Eigen::Index k = static_cast<Eigen::Index>(eig.count());
  if (psi0.size() != eig.vectors.rows()) throw DomainError("state dimension mismatch");
  const Eigen::MatrixXcd U = eig.vectors.cast<std::complex<double>>();
  ComplexVector coef = U.adjoint() * psi0;
  for (Eigen::Index j = 0; j < k; ++j)
    coef(j) *= std::exp(std::complex<double>(0.0, -t * eig.values[static_cast<std::size_t>(j)]));
  return U * coef;
}

std::vector<double> default_time_grid(const DynlocOptions& opt) {
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(opt.grid_points + opt.random_times));
  for (int i = 0; i < opt.grid_points; ++i)
    t.push_back(opt.grid_points == 1 ? 0.0 : opt.t_max * i / (opt.grid_points - 1));
  SequentialRng rng(opt.seed, 0x7135);
  for (int i = 0; i < opt.random_times; ++i) t.push_back(rng.uniform(0.0, opt.t_max));
  return t;
}

double dynloc_moment(const EigenData& eig, const Cube& cube, double E0, double b, double s,
                     const std::vector<double>& times) {
  if (!(b >= 0.0)) throw DomainError("b must be non-negative");
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("s must lie in (0, 1]");
  const std::size_t ic = cube.index_of(cube.center());
  std::vector<Eigen::Index> in;
  for (std::size_t k = 0; k < eig.count(); ++k)
    if (eig.values[k] >= 0.0 && eig.values[k] <= E0) in.push_back(static_cast<Eigen::Index>(k));
  if (in.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(cube.size());
  const auto m = static_cast<Eigen::Index>(in.size());
  // weighted projected eigenvectors: A(:, j) = <X>^b u_j u_j(center)
  Eigen::MatrixXd A(n, m);
  Eigen::VectorXd energies(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto col = eig.vectors.col(in[static_cast<std::size_t>(j)]);
    energies(j) = eig.values[static_cast<std::size_t>(in[static_cast<std::size_t>(j)])];
    A.col(j) = col * col(static_cast<Eigen::Index>(ic));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = b == 0.0 ? 1.0 : std::pow(norm2(cube.site_at(static_cast<std::size_t>(i))), b);
    A.row(i) *= w;
  }
  // || A c(t) ||^2 = c(t)^* G c(t), G = A^T A
  const Eigen::MatrixXcd G = (A.transpose() * A).cast<std::complex<double>>();
  double best = 0.0;
  Eigen::VectorXcd c(m);
  for (double t : times) {
    for (Eigen::Index j = 0; j < m; ++j) c(j) = std::exp(std::complex<double>(0.0, -t * energies(j)));
    const double q = std::max(0.0, (c.adjoint() * G * c)(0).real());
    best = std::max(best, q);
  }
  return std::pow(std::sqrt(best), s);
}

double dynloc_moment(const Hamiltonian& H, double E0, double b, double s, const std::vector<double>& times) {
  if (H.dim() <= 1331) return dynloc_moment(eigendecompose(H), H.cube(), E0, b, s, times);
  std::size_t count = 1;
  while (true) {
    ExtremalResult r = extremal_eigs(H, count, SpectrumEnd::low);
    if (r.data.values.front() > E0 || count >= H.dim())
      return dynloc_moment(r.data, H.cube(), E0, b, s, times);
    if (count >= 256) throw NumericError("too many eigenpairs below E0 for the iterative dynloc path");
    count *= 2;
  }
}

}  // namespace anderson
