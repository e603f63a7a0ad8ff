#include "ncindex/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace ncindex {

namespace {

void require_square(const Matrix& m) {
  if (m.rows() != m.cols()) throw LinalgError("operator must be square");
}

void require_finite(const Matrix& m) {
  if (!m.allFinite()) throw LinalgError("matrix has non-finite entries");
}

}  // namespace

double even_defect(const Matrix& m, const RealVector& g) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (g(i) * g(j) < 0) d = std::max(d, std::abs(m(i, j)));
  return d;
}

double odd_defect(const Matrix& m, const RealVector& g) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (g(i) * g(j) > 0) d = std::max(d, std::abs(m(i, j)));
  return d;
}

GradedOperator GradedOperator::even(Matrix m, RealVector g, const Tolerances& tol) {
  require_square(m);
  require_finite(m);
  if (g.size() != m.rows()) throw LinalgError("grading size mismatch");
  const double d = even_defect(m, g);
  if (d > tol.parity) {
    std::ostringstream os;
    os << "operator is not even: off-block defect " << d;
    throw LinalgError(os.str());
  }
  return GradedOperator{std::move(m), Parity::Even, std::move(g)};
}

GradedOperator GradedOperator::odd(Matrix m, RealVector g, const Tolerances& tol) {
  require_square(m);
  require_finite(m);
  if (g.size() != m.rows()) throw LinalgError("grading size mismatch");
  const double d = odd_defect(m, g);
  if (d > tol.parity) {
    std::ostringstream os;
    os << "operator is not odd: diagonal-block defect " << d;
    throw LinalgError(os.str());
  }
  return GradedOperator{std::move(m), Parity::Odd, std::move(g)};
}

GradedOperator GradedOperator::ungraded(Matrix m) {
  require_square(m);
  require_finite(m);
  return GradedOperator{std::move(m), Parity::Ungraded, RealVector()};
}

GradedOperator GradedOperator::classify(Matrix m, RealVector g, const Tolerances& tol) {
  const double de = even_defect(m, g);
  const double dodd = odd_defect(m, g);
  if (de <= tol.parity) return GradedOperator{std::move(m), Parity::Even, std::move(g)};
  if (dodd <= tol.parity) return GradedOperator{std::move(m), Parity::Odd, std::move(g)};
  std::ostringstream os;
  os << "operator has mixed parity (even defect " << de << ", odd defect " << dodd << ")";
  throw LinalgError(os.str());
}

cx supertrace(const GradedOperator& op) {
  if (op.parity == Parity::Ungraded || op.grading.size() == 0)
    throw LinalgError("supertrace requires grading");
  cx s = 0.0;
  for (Eigen::Index i = 0; i < op.dim(); ++i) s += op.grading(i) * op.mat(i, i);
  return s;
}

EigenResult hermitian_eigen(const Matrix& m, const Tolerances& tol) {
  require_square(m);
  require_finite(m);
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol.hermiticity) {
    std::ostringstream os;
    os << "matrix is not Hermitian: ||M - M*||_max = " << asym;
    throw LinalgError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) * 0.5);
  if (solver.info() != Eigen::Success) throw LinalgError("eigensolver failed to converge");
  return EigenResult{solver.eigenvalues(), solver.eigenvectors()};
}

GradedOperator sign_operator(const GradedOperator& d, ZeroConvention zero,
                             std::optional<double> kernel_threshold, const Tolerances& tol) {
  EigenResult eig = hermitian_eigen(d.mat, tol);
  const double dnorm = std::max(std::abs(eig.eigenvalues(0)),
                                std::abs(eig.eigenvalues(eig.eigenvalues.size() - 1)));
  const double thresh = kernel_threshold.value_or(tol.kernel_rel * std::max(dnorm, 1.0));

  std::vector<Eigen::Index> kernel;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (std::abs(eig.eigenvalues(i)) < thresh) kernel.push_back(i);

  if (!kernel.empty() && zero == ZeroConvention::Error) {
    std::ostringstream os;
    os << "sign_operator: kernel detected, near-zero eigenvalues:";
    for (Eigen::Index i : kernel) os << " " << eig.eigenvalues(i);
    throw LinalgError(os.str());
  }

  RealVector signs(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < signs.size(); ++i)
    signs(i) = eig.eigenvalues(i) >= 0.0 ? 1.0 : -1.0;
  for (Eigen::Index i : kernel) signs(i) = 1.0;

  Matrix f = eig.eigenvectors * signs.asDiagonal() * eig.eigenvectors.adjoint();

  if (d.parity == Parity::Odd && !kernel.empty()) {
    // ker D is gamma-invariant. The +1 convention would make F commute with
    // gamma there; replace it by the grading swap on the kernel so F keeps
    // D's parity exactly. Requires a balanced kernel.
    Matrix kbasis(d.dim(), static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t c = 0; c < kernel.size(); ++c) kbasis.col(c) = eig.eigenvectors.col(kernel[c]);
    // split the kernel by gamma
    Matrix gk = d.grading.asDiagonal() * kbasis;
    Matrix pk = 0.5 * (kbasis + gk);  // gamma = +1 part
    Matrix mk = 0.5 * (kbasis - gk);
    Eigen::JacobiSVD<Matrix> svp(pk, Eigen::ComputeThinU);
    Eigen::JacobiSVD<Matrix> svm(mk, Eigen::ComputeThinU);
    Eigen::Index rp = 0, rm = 0;
    for (Eigen::Index i = 0; i < svp.singularValues().size(); ++i)
      if (svp.singularValues()(i) > 1e-9) ++rp;
    for (Eigen::Index i = 0; i < svm.singularValues().size(); ++i)
      if (svm.singularValues()(i) > 1e-9) ++rm;
    if (rp != rm)
      throw LinalgError("sign_operator: unbalanced kernel of odd operator, no parity-preserving sign");
    Matrix up = svp.matrixU().leftCols(rp);
    Matrix um = svm.matrixU().leftCols(rm);
    // remove the +1 the PlusOne branch put on the kernel, add the swap
    Matrix kproj = kbasis * kbasis.adjoint();
    f -= kproj;
    f += up * um.adjoint() + um * up.adjoint();
  }

  f = 0.5 * (f + f.adjoint());

  GradedOperator out;
  out.mat = std::move(f);
  out.parity = d.parity;
  out.grading = d.grading;
  return out;
}

KernelCount svd_kernel_dim(const Matrix& m, double threshold) {
  if (threshold <= 0.0) throw LinalgError("svd_kernel_dim: threshold must be positive");
  KernelCount out;
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  double largest_discarded = 0.0;
  double smallest_kept = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) < threshold) {
      ++out.dim;
      largest_discarded = std::max(largest_discarded, s(i));
    } else {
      smallest_kept = (smallest_kept == 0.0) ? s(i) : std::min(smallest_kept, s(i));
    }
  }
  out.gap_ratio = (smallest_kept > 0.0) ? largest_discarded / smallest_kept : 0.0;
  return out;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace ncindex
