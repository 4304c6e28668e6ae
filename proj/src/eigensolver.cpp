#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "anderson/operators.hpp"

namespace anderson {

namespace {

void check_cap(const Hamiltonian& H, std::size_t cap) {
  if (H.dim() > cap)
    throw DomainError("dimension " + std::to_string(H.dim()) + " exceeds the dense cap " + std::to_string(cap) +
                      "; use extremal_eigs for large cubes");
}

}  // namespace

EigenData eigendecompose(const Hamiltonian& H, std::size_t dense_cap) {
  check_cap(H, dense_cap);
  const auto n = static_cast<lapack_int>(H.dim());
  Eigen::MatrixXd A = H.dense();
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, A.data(), n, w.data());
  if (info != 0) throw NumericError("dsyevd failed with info " + std::to_string(info));
  EigenData out;
  out.values.assign(w.rbegin(), w.rend());
  out.vectors = A.rowwise().reverse();
  canonicalize_eigenbasis(out);
  return out;
}

std::vector<double> eigenvalues(const Hamiltonian& H, std::size_t dense_cap) {
  check_cap(H, dense_cap);
  const auto n = static_cast<lapack_int>(H.dim());
  const auto s = static_cast<lapack_int>(H.cube().side());
  const lapack_int kd = H.hopping() ? std::min<lapack_int>(s * s, n - 1) : 0;
  const lapack_int ldab = kd + 1;
  // upper band storage: ab[kd + i - j + j*ldab] = A(i, j) for i <= j
  std::vector<double> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n), 0.0);
  auto at = [&](lapack_int i, lapack_int j) -> double& {
    return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab)];
  };
  const Eigen::SparseMatrix<double> S = H.sparse();
  for (Eigen::Index j = 0; j < S.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, j); it; ++it)
      if (it.row() <= it.col()) at(static_cast<lapack_int>(it.row()), static_cast<lapack_int>(it.col())) = it.value();
  std::vector<double> w(static_cast<std::size_t>(n));
  double z = 0.0;
  const lapack_int info = LAPACKE_dsbevd(LAPACK_COL_MAJOR, 'N', 'U', n, kd, ab.data(), ldab, w.data(), &z, 1);
  if (info != 0) throw NumericError("dsbevd failed with info " + std::to_string(info));
  return {w.rbegin(), w.rend()};
}

void canonicalize_eigenbasis(EigenData& data, double gap_tol) {
  const std::size_t m = data.values.size();
  const Eigen::Index n = data.vectors.rows();
  std::size_t start = 0;
  while (start < m) {
    std::size_t end = start + 1;
    while (end < m && std::abs(data.values[end - 1] - data.values[end]) < gap_tol) ++end;
    const std::size_t k = end - start;
    if (k > 1) {
      const Eigen::MatrixXd U = data.vectors.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(k));
      Eigen::MatrixXd B(n, static_cast<Eigen::Index>(k));
      Eigen::Index found = 0;
      const double accept = 1e-3 * std::sqrt(static_cast<double>(k) / static_cast<double>(n));
      for (Eigen::Index i = 0; i < n && found < static_cast<Eigen::Index>(k); ++i) {
        // projection of e_i onto the cluster span
        Eigen::VectorXd v = U * U.row(i).transpose();
        for (int pass = 0; pass < 2; ++pass)
          for (Eigen::Index c = 0; c < found; ++c) v -= B.col(c).dot(v) * B.col(c);
        const double nv = v.norm();
        if (nv > accept) B.col(found++) = v / nv;
      }
      if (found == static_cast<Eigen::Index>(k))
        data.vectors.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(k)) = B;
    }
    start = end;
  }
  for (std::size_t j = 0; j < m; ++j) {
    auto col = data.vectors.col(static_cast<Eigen::Index>(j));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-8) {
        if (col(i) < 0) col *= -1.0;
        break;
      }
    }
  }
}

}  // namespace anderson
