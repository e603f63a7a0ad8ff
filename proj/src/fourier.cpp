#include "ncindex/fourier.hpp"

#include <cmath>
#include <numbers>

namespace ncindex {

void FourierSymbol::add(const Offset& d, const Matrix& c) {
  if (c.rows() != block_ || c.cols() != block_) throw LinalgError("coefficient block size mismatch");
  for (int k = dims_; k < 3; ++k)
    if (d[static_cast<std::size_t>(k)] != 0) throw LinalgError("offset beyond symbol dimensions");
  auto it = coeffs_.find(d);
  if (it == coeffs_.end())
    coeffs_.emplace(d, c);
  else
    it->second += c;
}

FourierSymbol FourierSymbol::identity(int dims, int block) {
  FourierSymbol f(dims, block);
  f.add(Offset{0, 0, 0}, Matrix::Identity(block, block));
  return f;
}

FourierSymbol FourierSymbol::constant(int dims, const Matrix& c) {
  FourierSymbol f(dims, static_cast<int>(c.rows()));
  f.add(Offset{0, 0, 0}, c);
  return f;
}

FourierSymbol FourierSymbol::phase(int dims, int block, int dir, int k) {
  FourierSymbol f(dims, block);
  Offset d{};
  d[static_cast<std::size_t>(dir)] = k;
  f.add(d, Matrix::Identity(block, block));
  return f;
}

Offset FourierSymbol::band() const {
  Offset b{};
  for (const auto& [d, c] : coeffs_)
    for (std::size_t k = 0; k < 3; ++k) b[k] = std::max(b[k], std::abs(d[k]));
  return b;
}

int FourierSymbol::max_band() const {
  const Offset b = band();
  return std::max({b[0], b[1], b[2]});
}

FourierSymbol FourierSymbol::adjoint() const {
  FourierSymbol out(dims_, block_);
  for (const auto& [d, c] : coeffs_)
    out.add(Offset{-d[0], -d[1], -d[2]}, c.adjoint());
  return out;
}

FourierSymbol FourierSymbol::product(const FourierSymbol& g) const {
  if (g.block_ != block_ || g.dims_ != dims_) throw LinalgError("symbol product shape mismatch");
  FourierSymbol out(dims_, block_);
  for (const auto& [d1, c1] : coeffs_)
    for (const auto& [d2, c2] : g.coeffs_)
      out.add(Offset{d1[0] + d2[0], d1[1] + d2[1], d1[2] + d2[2]}, c1 * c2);
  return out;
}

FourierSymbol FourierSymbol::scaled(cx a) const {
  FourierSymbol out(dims_, block_);
  for (const auto& [d, c] : coeffs_) out.add(d, a * c);
  return out;
}

FourierSymbol FourierSymbol::plus(const FourierSymbol& g) const {
  FourierSymbol out = *this;
  for (const auto& [d, c] : g.coeffs_) out.add(d, c);
  return out;
}

Matrix FourierSymbol::eval(const std::array<double, 3>& theta) const {
  Matrix v = Matrix::Zero(block_, block_);
  for (const auto& [d, c] : coeffs_) {
    const double ph = d[0] * theta[0] + d[1] * theta[1] + d[2] * theta[2];
    v += std::polar(1.0, ph) * c;
  }
  return v;
}

double FourierSymbol::truncate_tail(double tol) {
  double mass2 = 0.0;
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    const double n = it->second.norm();
    if (n < tol) {
      mass2 += n * n;
      it = coeffs_.erase(it);
    } else {
      ++it;
    }
  }
  return std::sqrt(mass2);
}

namespace {

template <class DefectFn>
double grid_sup(const FourierSymbol& f, int samples, DefectFn&& defect) {
  const double step = 2.0 * std::numbers::pi / samples;
  double worst = 0.0;
  std::array<int, 3> n{1, 1, 1};
  for (int d = 0; d < f.dims(); ++d) n[static_cast<std::size_t>(d)] = samples;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) {
        const Matrix v = f.eval({i * step, j * step, k * step});
        worst = std::max(worst, defect(v));
      }
  return worst;
}

}  // namespace

double FourierSymbol::unitarity_defect(int samples) const {
  const Matrix id = Matrix::Identity(block_, block_);
  return grid_sup(*this, samples,
                  [&](const Matrix& v) { return (v * v.adjoint() - id).cwiseAbs().maxCoeff(); });
}

double FourierSymbol::idempotent_defect(int samples) const {
  return grid_sup(*this, samples,
                  [](const Matrix& v) { return (v * v - v).cwiseAbs().maxCoeff(); });
}

Matrix FourierSymbol::compress(const ModeLattice& lattice, int spinor) const {
  if (spinor * block_ != lattice.fiber) throw LinalgError("compress: fiber mismatch");
  if (dims_ != lattice.dims) throw LinalgError("compress: dimension mismatch");
  const Eigen::Index nm = lattice.num_modes();
  const int f = lattice.fiber;
  Matrix out = Matrix::Zero(lattice.dim(), lattice.dim());
  const Matrix idsp = Matrix::Identity(spinor, spinor);
  for (const auto& [d, c] : coeffs_) {
    const Matrix blk = kron(idsp, c);
    for (Eigen::Index i = 0; i < nm; ++i) {
      Offset m = lattice.mode_at(i);
      const Offset tgt{m[0] + d[0], m[1] + d[1], m[2] + d[2]};
      const Eigen::Index j = lattice.mode_index(tgt);
      if (j >= 0) out.block(j * f, i * f, f, f) += blk;
    }
  }
  return out;
}

}  // namespace ncindex
