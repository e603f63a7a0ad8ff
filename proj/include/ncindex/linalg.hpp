#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ncindex/tolerances.hpp"

namespace ncindex {

using cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Z2-graded finite-dimensional space H = H+ (+) H- with the canonical
// grading gamma = diag(+1...+1, -1...-1).
struct GradedSpace {
  Eigen::Index dim_plus = 0;
  Eigen::Index dim_minus = 0;

  Eigen::Index total() const { return dim_plus + dim_minus; }
  RealVector gamma() const {
    RealVector g(total());
    g.head(dim_plus).setOnes();
    g.tail(dim_minus).setConstant(-1.0);
    return g;
  }
};

enum class Parity { Even, Odd, Ungraded };

// Square complex matrix with a parity tag relative to a +-1 grading vector.
// Even operators commute with gamma (block-diagonal), odd operators
// anticommute (block-off-diagonal). Mixed matrices are rejected at
// construction. The grading need not be sorted; lattice-built triples use an
// interleaved fiber grading, GradedSpace provides the canonical sorted one.
struct GradedOperator {
  Matrix mat;
  Parity parity = Parity::Ungraded;
  RealVector grading;  // empty iff ungraded

  Eigen::Index dim() const { return mat.rows(); }

  static GradedOperator even(Matrix m, RealVector g, const Tolerances& tol = default_tolerances());
  static GradedOperator odd(Matrix m, RealVector g, const Tolerances& tol = default_tolerances());
  static GradedOperator ungraded(Matrix m);
  static GradedOperator even(Matrix m, const GradedSpace& s, const Tolerances& tol = default_tolerances()) {
    return even(std::move(m), s.gamma(), tol);
  }
  static GradedOperator odd(Matrix m, const GradedSpace& s, const Tolerances& tol = default_tolerances()) {
    return odd(std::move(m), s.gamma(), tol);
  }
  // classify automatically (Even if it commutes, Odd if it anticommutes)
  static GradedOperator classify(Matrix m, RealVector g, const Tolerances& tol = default_tolerances());
};

// parity defects ||gamma M gamma -+ M||_max
double even_defect(const Matrix& m, const RealVector& g);
double odd_defect(const Matrix& m, const RealVector& g);

// Tr(gamma M). Errors on ungraded input.
cx supertrace(const GradedOperator& op);

struct EigenResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns
};

// Hermitian eigendecomposition M = U L U*. Input must be Hermitian within
// tol.hermiticity (max norm); the error message carries the measured
// asymmetry.
EigenResult hermitian_eigen(const Matrix& m, const Tolerances& tol = default_tolerances());

enum class ZeroConvention { PlusOne, Error };

// F = sign(D) via eigendecomposition, F = F*, F^2 = 1. Eigenvalues with
// |lambda| < threshold (default kernel_rel * ||D||_op) are kernel modes:
//   - ungraded or even D: mapped to +1 (Hardy convention),
//   - odd D: the kernel is gamma-invariant and balanced; it gets the
//     grading-swap so F stays exactly odd.
// With ZeroConvention::Error a detected kernel raises instead, listing the
// near-zero eigenvalues.
GradedOperator sign_operator(const GradedOperator& d,
                             ZeroConvention zero = ZeroConvention::PlusOne,
                             std::optional<double> kernel_threshold = std::nullopt,
                             const Tolerances& tol = default_tolerances());

struct KernelCount {
  Eigen::Index dim = 0;
  // largest discarded singular value / smallest kept one (0 when one side is
  // empty); small is good.
  double gap_ratio = 0.0;
};

// number of singular values below threshold, with the spectral gap ratio as
// a reliability diagnostic
KernelCount svd_kernel_dim(const Matrix& m, double threshold);

double operator_norm(const Matrix& m);  // largest singular value

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace ncindex
