#include "ncindex/ktheory.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ncindex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t factorial(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Rational ch1_coefficient(int k) {
  if (k < 0) throw KTheoryError("ch1_coefficient: k must be >= 0");
  if (k > 20) throw KTheoryError("ch1_coefficient: k out of table range");
  const std::int64_t f = factorial(k);
  return Rational{(k % 2 == 0) ? f : -f, 1};
}

Rational ch0_coefficient(int k) {
  if (k < 0) throw KTheoryError("ch0_coefficient: k must be >= 0");
  if (k > 20) throw KTheoryError("ch0_coefficient: k out of table range");
  return Rational{1, factorial(k)};
}

void UnitaryLoop::check_invariants(const Tolerances& tol) const {
  const Matrix id = Matrix::Identity(size, size);
  for (const Matrix& g : grid) {
    const double u = (g.adjoint() * g - id).cwiseAbs().maxCoeff();
    if (u > tol.unitarity) {
      std::ostringstream os;
      os << "loop sample is not unitary (defect " << u << ")";
      throw KTheoryError(os.str());
    }
  }
  // grid/Fourier consistency
  const int j = samples();
  for (int s = 0; s < j; s += std::max(1, j / 8)) {
    const Matrix v = fourier.eval({kTwoPi * s / j, 0, 0});
    if ((v - grid[static_cast<std::size_t>(s)]).cwiseAbs().maxCoeff() > 1e-6 + tail_mass * 10)
      throw KTheoryError("loop grid and Fourier representations disagree");
  }
}

UnitaryLoop loop_from_winding(const std::vector<int>& windings, std::optional<Matrix> constant_factor,
                              int samples) {
  const int n = static_cast<int>(windings.size());
  if (n < 1) throw KTheoryError("loop_from_winding: empty winding list");
  Matrix u = constant_factor.value_or(Matrix::Identity(n, n));
  if (u.rows() != n || u.cols() != n) throw KTheoryError("loop_from_winding: factor size mismatch");

  int band = 0;
  for (int k : windings) band = std::max(band, std::abs(k));
  const int j = (samples > 0) ? samples : 4 * band + 16;

  UnitaryLoop loop;
  loop.size = n;
  loop.band = band;
  loop.exact_band = true;
  loop.fourier = FourierSymbol(1, n);
  loop.fourier_inverse = FourierSymbol(1, n);

  const Matrix ui = u.adjoint();
  for (int k = -band; k <= band; ++k) {
    Matrix c = Matrix::Zero(n, n);
    Matrix ci = Matrix::Zero(n, n);
    bool any = false, anyi = false;
    for (int b = 0; b < n; ++b) {
      if (windings[static_cast<std::size_t>(b)] == k) {
        c.row(b) = u.row(b);
        any = true;
      }
      if (windings[static_cast<std::size_t>(b)] == -k) {
        ci.col(b) = ui.col(b);
        anyi = true;
      }
    }
    if (any) loop.fourier.add(Offset{k, 0, 0}, c);
    if (anyi) loop.fourier_inverse.add(Offset{k, 0, 0}, ci);
  }

  loop.grid.reserve(static_cast<std::size_t>(j));
  for (int s = 0; s < j; ++s) {
    Matrix g = Matrix::Zero(n, n);
    for (int b = 0; b < n; ++b)
      g(b, b) = std::polar(1.0, kTwoPi * windings[static_cast<std::size_t>(b)] * s / j);
    loop.grid.push_back(g * u);
  }
  return loop;
}

UnitaryLoop loop_from_fourier(const FourierSymbol& f, double tail_tol, const Tolerances& tol) {
  if (f.dims() != 1) throw KTheoryError("loop_from_fourier: expected a 1-D symbol");
  const int n = f.block();
  const int band = f.max_band();
  const int j = 4 * band + 16;

  UnitaryLoop loop;
  loop.size = n;
  loop.fourier = f;
  loop.tail_mass = loop.fourier.truncate_tail(tail_tol);
  loop.exact_band = loop.tail_mass == 0.0;
  loop.band = loop.fourier.max_band();

  loop.grid.reserve(static_cast<std::size_t>(j));
  const Matrix id = Matrix::Identity(n, n);
  for (int s = 0; s < j; ++s) {
    Matrix g = f.eval({kTwoPi * s / j, 0, 0});
    const double u = (g.adjoint() * g - id).cwiseAbs().maxCoeff();
    if (u > tol.unitarity + 10 * loop.tail_mass) {
      std::ostringstream os;
      os << "loop_from_fourier: sample not unitary (defect " << u << ")";
      throw KTheoryError(os.str());
    }
    loop.grid.push_back(std::move(g));
  }
  // pointwise inverse of a unitary loop = pointwise adjoint, whose Fourier
  // data is exactly the coefficient-wise adjoint
  loop.fourier_inverse = loop.fourier.adjoint();
  return loop;
}

void Idempotent::check_invariants(const Tolerances& tol) const {
  for (const Matrix& e : samples) {
    const double d = (e * e - e).cwiseAbs().maxCoeff();
    if (d > tol.idempotent) {
      std::ostringstream os;
      os << "idempotent defect " << d;
      throw KTheoryError(os.str());
    }
    if (self_adjoint) {
      const double h = (e - e.adjoint()).cwiseAbs().maxCoeff();
      if (h > tol.hermiticity) throw KTheoryError("idempotent flagged self-adjoint is not");
    }
  }
}

Idempotent qwz_projector(std::array<int, 2> grid, double m, double tail_tol, const Tolerances& tol) {
  const int j1 = grid[0], j2 = grid[1];
  if (j1 < 4 || j2 < 4) throw KTheoryError("qwz_projector: grid too small");

  Matrix s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, cx(0, -1), cx(0, 1), 0;
  s3 << 1, 0, 0, -1;
  const Matrix id = Matrix::Identity(2, 2);

  Idempotent e;
  e.dims = 2;
  e.grid_count = {j1, j2};
  e.algebra_size = 2;
  e.self_adjoint = true;
  e.samples.reserve(static_cast<std::size_t>(j1) * j2);

  double min_gap = 1e300;
  for (int a = 0; a < j1; ++a)
    for (int b = 0; b < j2; ++b) {
      const double t1 = kTwoPi * a / j1, t2 = kTwoPi * b / j2;
      const double v1 = std::sin(t1), v2 = std::sin(t2), v3 = m - std::cos(t1) - std::cos(t2);
      const double r = std::sqrt(v1 * v1 + v2 * v2 + v3 * v3);
      min_gap = std::min(min_gap, r);
      if (r < 1e-6) {
        std::ostringstream os;
        os << "qwz_projector: gap closure on grid (|n| = " << r << " at (" << a << "," << b << "))";
        throw KTheoryError(os.str());
      }
      e.samples.push_back(0.5 * (id - (v1 * s1 + v2 * s2 + v3 * s3) / r));
    }

  // 2-D Fourier transform, tail-truncated
  e.fourier = FourierSymbol(2, 2);
  double mass2 = 0.0;
  const int b1 = j1 / 2 - 1, b2 = j2 / 2 - 1;
  for (int d1 = -b1; d1 <= b1; ++d1)
    for (int d2 = -b2; d2 <= b2; ++d2) {
      Matrix c = Matrix::Zero(2, 2);
      for (int a = 0; a < j1; ++a)
        for (int b = 0; b < j2; ++b)
          c += e.at(a, b) * std::polar(1.0, -kTwoPi * (static_cast<double>(d1) * a / j1 +
                                                       static_cast<double>(d2) * b / j2));
      c /= static_cast<double>(j1) * j2;
      const double n = c.norm();
      if (n >= tail_tol)
        e.fourier.add(Offset{d1, d2, 0}, c);
      else
        mass2 += n * n;
    }
  e.tail_mass = std::sqrt(mass2);
  e.check_invariants(tol);
  return e;
}

Idempotent miscenko_idempotent(const std::vector<std::vector<double>>& partition,
                               const std::vector<std::vector<std::vector<Matrix>>>& transitions,
                               const Tolerances& tol) {
  const std::size_t ncharts = partition.size();
  if (ncharts == 0) throw KTheoryError("miscenko_idempotent: no charts");
  const std::size_t j = partition[0].size();
  for (const auto& rho : partition)
    if (rho.size() != j) throw KTheoryError("miscenko_idempotent: partition grids differ");
  if (transitions.size() != ncharts) throw KTheoryError("miscenko_idempotent: transition shape");

  const Eigen::Index gsize = transitions[0][0][0].rows();

  // partition of unity: sum rho_i^2 = 1
  for (std::size_t s = 0; s < j; ++s) {
    double acc = 0.0;
    for (const auto& rho : partition) acc += rho[s] * rho[s];
    if (std::abs(acc - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "miscenko_idempotent: sum rho^2 - 1 = " << acc - 1.0 << " at sample " << s;
      throw KTheoryError(os.str());
    }
  }

  // g_ii = 1 and the cocycle condition g_ij g_jk = g_ik wherever all three
  // charts overlap (all rho factors nonzero)
  const Matrix id = Matrix::Identity(gsize, gsize);
  for (std::size_t s = 0; s < j; ++s) {
    for (std::size_t i = 0; i < ncharts; ++i) {
      if (partition[i][s] == 0.0) continue;
      if ((transitions[i][i][s] - id).cwiseAbs().maxCoeff() > 1e-10)
        throw KTheoryError("miscenko_idempotent: g_ii != 1");
      for (std::size_t jj = 0; jj < ncharts; ++jj) {
        if (partition[jj][s] == 0.0) continue;
        for (std::size_t k = 0; k < ncharts; ++k) {
          if (partition[k][s] == 0.0) continue;
          const double r =
              (transitions[i][jj][s] * transitions[jj][k][s] - transitions[i][k][s]).cwiseAbs().maxCoeff();
          if (r > 1e-9) {
            std::ostringstream os;
            os << "miscenko_idempotent: cocycle residual " << r << " at sample " << s;
            throw KTheoryError(os.str());
          }
        }
      }
    }
  }

  Idempotent e;
  e.dims = 1;
  e.grid_count = {static_cast<int>(j), 1};
  e.algebra_size = static_cast<int>(ncharts * static_cast<std::size_t>(gsize));
  e.self_adjoint = true;
  e.samples.reserve(j);
  for (std::size_t s = 0; s < j; ++s) {
    Matrix blk = Matrix::Zero(e.algebra_size, e.algebra_size);
    for (std::size_t i = 0; i < ncharts; ++i)
      for (std::size_t k = 0; k < ncharts; ++k)
        blk.block(static_cast<Eigen::Index>(i) * gsize, static_cast<Eigen::Index>(k) * gsize, gsize,
                  gsize) = partition[i][s] * partition[k][s] * transitions[i][k][s];
    e.samples.push_back(std::move(blk));
  }
  e.check_invariants(tol);
  return e;
}

SuspendedLoop bott_clutching_loop(const Idempotent& q, const Tolerances& tol) {
  double defect = 0.0;
  for (const Matrix& e : q.samples) {
    defect = std::max(defect, (e * e - e).cwiseAbs().maxCoeff());
    defect = std::max(defect, (e - e.adjoint()).cwiseAbs().maxCoeff());
  }
  if (defect > tol.idempotent) {
    std::ostringstream os;
    os << "bott_clutching_loop: input not a self-adjoint idempotent (max defect " << defect << ")";
    throw KTheoryError(os.str());
  }

  SuspendedLoop loop;
  loop.size = q.algebra_size;
  loop.tail_mass = q.tail_mass;
  loop.exact_band = q.tail_mass == 0.0;
  const int dims = q.dims + 1;
  loop.fourier = FourierSymbol(dims, q.algebra_size);
  loop.fourier_inverse = FourierSymbol(dims, q.algebra_size);
  // g = e^{i theta} q + (1 - q); g^{-1} = e^{-i theta} q + (1 - q)
  for (const auto& [d, c] : q.fourier.coeffs()) {
    loop.fourier.add(Offset{1, d[0], d[1]}, c);
    loop.fourier.add(Offset{0, d[0], d[1]}, -c);
    loop.fourier_inverse.add(Offset{-1, d[0], d[1]}, c);
    loop.fourier_inverse.add(Offset{0, d[0], d[1]}, -c);
  }
  const Matrix id = Matrix::Identity(q.algebra_size, q.algebra_size);
  loop.fourier.add(Offset{0, 0, 0}, id);
  loop.fourier_inverse.add(Offset{0, 0, 0}, id);
  return loop;
}

Matrix loop_as_element(const UnitaryLoop& loop, const SpectralTriple& t) {
  if (loop.exact_band && !cutoff_admits_band(t, loop.band))
    throw KTheoryError("loop_as_element: loop band too large for the mode cutoff");
  FourierSymbol f = loop.fourier;
  if (t.lattice.dims > 1) {
    // embed the 1-D loop along the circle direction of a product lattice
    FourierSymbol g(t.lattice.dims, f.block());
    for (const auto& [d, c] : f.coeffs()) g.add(Offset{d[0], 0, 0}, c);
    f = g;
  }
  return compress_symbol(f, t);
}

bool cutoff_admits_band(const SpectralTriple& t, int band) {
  return t.lattice.cutoff[0] >= 2 * band && band >= 0;
}

}  // namespace ncindex
