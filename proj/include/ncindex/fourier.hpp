#pragma once

#include <array>
#include <map>
#include <vector>

#include "ncindex/linalg.hpp"

namespace ncindex {

using Offset = std::array<int, 3>;  // unused trailing directions are 0

// Sharp Fourier truncation: modes m with |m_i| <= cutoff[i] per circle
// direction, a fiber of dimension `fiber` attached to every mode. Flat
// layout: modes row-major over directions, fiber innermost.
struct ModeLattice {
  int dims = 1;
  Offset cutoff{};
  int fiber = 1;

  Eigen::Index modes_per_dir(int d) const { return 2 * cutoff[static_cast<std::size_t>(d)] + 1; }
  Eigen::Index num_modes() const {
    Eigen::Index n = 1;
    for (int d = 0; d < dims; ++d) n *= modes_per_dir(d);
    return n;
  }
  Eigen::Index dim() const { return num_modes() * fiber; }

  // -1 when out of the window
  Eigen::Index mode_index(const Offset& m) const {
    Eigen::Index idx = 0;
    for (int d = 0; d < dims; ++d) {
      const int c = cutoff[static_cast<std::size_t>(d)];
      if (m[static_cast<std::size_t>(d)] < -c || m[static_cast<std::size_t>(d)] > c) return -1;
      idx = idx * (2 * c + 1) + (m[static_cast<std::size_t>(d)] + c);
    }
    return idx;
  }
  Offset mode_at(Eigen::Index idx) const {
    Offset m{};
    for (int d = dims - 1; d >= 0; --d) {
      const int c = cutoff[static_cast<std::size_t>(d)];
      m[static_cast<std::size_t>(d)] = static_cast<int>(idx % (2 * c + 1)) - c;
      idx /= (2 * c + 1);
    }
    return m;
  }
};

// Matrix-valued trigonometric polynomial f(theta) = sum_d c_d e^{i d.theta}
// on a torus of `dims` circle directions; the block size is the dimension of
// the algebra factor it multiplies. Coefficients are kept sorted by offset
// (deterministic iteration order).
class FourierSymbol {
 public:
  FourierSymbol() = default;
  FourierSymbol(int dims, int block) : dims_(dims), block_(block) {}

  int dims() const { return dims_; }
  int block() const { return block_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t num_coeffs() const { return coeffs_.size(); }

  void add(const Offset& d, const Matrix& c);
  const std::map<Offset, Matrix>& coeffs() const { return coeffs_; }

  static FourierSymbol identity(int dims, int block);
  static FourierSymbol constant(int dims, const Matrix& c);
  // scalar phase e^{i k theta_dir}
  static FourierSymbol phase(int dims, int block, int dir, int k);

  Offset band() const;     // max |offset| per direction
  int max_band() const;    // max over directions

  FourierSymbol adjoint() const;                       // f*
  FourierSymbol product(const FourierSymbol& g) const; // exact convolution f g
  FourierSymbol scaled(cx a) const;
  FourierSymbol plus(const FourierSymbol& g) const;

  Matrix eval(const std::array<double, 3>& theta) const;

  // drop coefficients with Frobenius norm < tol; returns the removed mass
  // (sqrt of the sum of squared norms)
  double truncate_tail(double tol);

  // pointwise sup defect of f f* = 1 over a uniform grid
  double unitarity_defect(int samples_per_dir = 17) const;
  // pointwise sup defect of f^2 = f
  double idempotent_defect(int samples_per_dir = 17) const;

  // dense compression P f P on a lattice whose fiber = spinor * block; the
  // symbol acts as I_spinor (x) c_d on each fiber and shifts the mode by d.
  Matrix compress(const ModeLattice& lattice, int spinor) const;

 private:
  int dims_ = 1;
  int block_ = 1;
  std::map<Offset, Matrix> coeffs_;
};

// Inverse-free representative of an invertible symbol: the pair (g, g^{-1})
// with the inverse supplied pointwise at construction, never by matrix
// inversion of a compression.
struct SymbolPair {
  FourierSymbol fwd;
  FourierSymbol inv;
  bool exact_band = true;   // false for tail-truncated smooth symbols
  double tail_mass = 0.0;   // recorded truncation tail
};

}  // namespace ncindex
