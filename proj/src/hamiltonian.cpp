#include <algorithm>
#include <cstring>

#include "anderson/operators.hpp"

namespace anderson {

Hamiltonian::Hamiltonian(Cube cube, std::vector<double> potential, bool hopping)
    : cube_(cube), potential_(std::move(potential)), hopping_(hopping) {
  if (potential_.size() != cube_.size()) throw DomainError("potential size does not match cube");
  for (double v : potential_)
    if (!std::isfinite(v)) throw DomainError("potential values must be finite");
}

double Hamiltonian::potential_max() const { return *std::max_element(potential_.begin(), potential_.end()); }
double Hamiltonian::potential_min() const { return *std::min_element(potential_.begin(), potential_.end()); }

double Hamiltonian::norm_bound() const {
  double m = 0.0;
  for (double v : potential_) m = std::max(m, std::abs(v));
  return (hopping_ ? 4.0 * kDim : 0.0) + m;
}

void Hamiltonian::apply(const double* x, double* y) const {
  const auto s = static_cast<std::size_t>(cube_.side());
  const std::size_t s2 = s * s;
  const std::size_t n = dim();
  if (!hopping_) {
    for (std::size_t i = 0; i < n; ++i) y[i] = potential_[i] * x[i];
    return;
  }
  for (std::size_t ix = 0; ix < s; ++ix) {
    for (std::size_t iy = 0; iy < s; ++iy) {
      const std::size_t row = ix * s2 + iy * s;
      for (std::size_t iz = 0; iz < s; ++iz) {
        const std::size_t i = row + iz;
        double acc = (2.0 * kDim + potential_[i]) * x[i];
        if (iz > 0) acc -= x[i - 1];
        if (iz + 1 < s) acc -= x[i + 1];
        if (iy > 0) acc -= x[i - s];
        if (iy + 1 < s) acc -= x[i + s];
        if (ix > 0) acc -= x[i - s2];
        if (ix + 1 < s) acc -= x[i + s2];
        y[i] = acc;
      }
    }
  }
}

Eigen::VectorXd Hamiltonian::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(x.data(), y.data());
  return y;
}

void Hamiltonian::apply_block(const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) const {
  Y.resize(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) apply(X.col(j).data(), Y.col(j).data());
}

Eigen::SparseMatrix<double> Hamiltonian::sparse(double shift) const {
  const std::size_t n = dim();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(n * (hopping_ ? 7 : 1));
  const auto s = static_cast<std::size_t>(cube_.side());
  const std::size_t strides[3] = {s * s, s, 1};
  for (std::size_t i = 0; i < n; ++i) {
    t.emplace_back(i, i, diagonal(i) - shift);
    if (!hopping_) continue;
    std::size_t rem = i;
    for (int a = 0; a < kDim; ++a) {
      const std::size_t coord = rem / strides[a];
      rem %= strides[a];
      if (coord > 0) t.emplace_back(i, i - strides[a], -1.0);
      if (coord + 1 < s) t.emplace_back(i, i + strides[a], -1.0);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd Hamiltonian::dense(double shift) const {
  return Eigen::MatrixXd(sparse(shift));
}

std::uint64_t Hamiltonian::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t r = cube_.radius();
  mix(&r, sizeof r);
  const unsigned char hop = hopping_ ? 1 : 0;
  mix(&hop, 1);
  mix(potential_.data(), potential_.size() * sizeof(double));
  return h;
}

namespace {
Hamiltonian checked(const Cube& cube, std::vector<double> v) {
  for (double x : v)
    if (x < 0.0) throw DomainError("potential values must be non-negative");
  return Hamiltonian(cube, std::move(v));
}
}  // namespace

Hamiltonian assemble(const Cube& cube, const std::unordered_map<Site, double, SiteHash>& potential) {
  std::vector<double> v(cube.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Site n = cube.site_at(i);
    auto it = potential.find(n);
    if (it == potential.end()) throw DomainError("potential missing at site " + to_string(n));
    v[i] = it->second;
  }
  return checked(cube, std::move(v));
}

Hamiltonian assemble(const Cube& cube, const std::map<Site, double>& potential) {
  std::vector<double> v(cube.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Site n = cube.site_at(i);
    auto it = potential.find(n);
    if (it == potential.end()) throw DomainError("potential missing at site " + to_string(n));
    v[i] = it->second;
  }
  return checked(cube, std::move(v));
}

Hamiltonian assemble(const Cube& cube, std::vector<double> potential_in_index_order) {
  return checked(cube, std::move(potential_in_index_order));
}

}  // namespace anderson
