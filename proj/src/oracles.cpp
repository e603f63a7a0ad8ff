#include "ncindex/oracles.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace ncindex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long long nearest(double x) { return std::llround(x); }

}  // namespace

OracleResult OracleResult::from_raw(double raw, std::string method) {
  OracleResult r;
  r.raw = raw;
  r.value = nearest(raw);
  r.method = std::move(method);
  r.defect = std::abs(raw - static_cast<double>(r.value));
  return r;
}

// ---------------------------------------------------------------------------
// winding quadrature
// ---------------------------------------------------------------------------

namespace {

double winding_quadrature_impl(const UnitaryLoop& loop, par::Exec exec) {
  const int j = loop.samples();
  if (j < 4 * std::max(loop.band, 1)) throw OracleError("winding_quadrature: grid too coarse");
  // derivative symbol: dg/dtheta = sum_d (i d) c_d e^{i d theta}
  FourierSymbol dsym(1, loop.size);
  for (const auto& [d, c] : loop.fourier.coeffs())
    if (d[0] != 0) dsym.add(d, cx(0.0, static_cast<double>(d[0])) * c);

  const cx total = par::sum_blocked<cx>(
      static_cast<std::size_t>(j), exec, [&](std::size_t s) -> cx {
        const double theta = kTwoPi * static_cast<double>(s) / j;
        const Matrix gi = loop.grid[s].adjoint();  // unitary inverse
        const Matrix dg = dsym.eval({theta, 0, 0});
        return (gi * dg).trace();
      });
  // (1/2 pi i) * (2 pi / J) * sum
  return (total / cx(0.0, static_cast<double>(j))).real();
}

}  // namespace

OracleResult winding_quadrature(const UnitaryLoop& loop, par::Exec exec) {
  return OracleResult::from_raw(winding_quadrature_impl(loop, exec), "winding_quadrature");
}

OracleResult ref::winding_quadrature(const UnitaryLoop& loop) {
  return OracleResult::from_raw(winding_quadrature_impl(loop, par::Exec::Serial),
                                "winding_quadrature_serial");
}

// ---------------------------------------------------------------------------
// Toeplitz index
// ---------------------------------------------------------------------------

namespace {

// count SVD null vectors of the Hardy compression whose mass avoids the top
// boundary strip; track the separation quality
struct StableKernel {
  Eigen::Index dim = 0;
  double worst_sigma_gap = 0.0;   // largest null sv / smallest kept sv
  double worst_mass_margin = 0.0; // closest boundary mass to the 0.5 divide
};

StableKernel stable_kernel(const Matrix& m, int modes, int block, int strip,
                           const Tolerances& tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = (s.size() > 0) ? s(0) : 1.0;
  const double thresh = std::max(1e-12, 1e-10 * scale);
  StableKernel out;
  double largest_null = 0.0, smallest_kept = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) >= thresh) {
      smallest_kept = (smallest_kept == 0.0) ? s(i) : std::min(smallest_kept, s(i));
      continue;
    }
    largest_null = std::max(largest_null, s(i));
    const Vector v = svd.matrixV().col(i);
    double mass = 0.0;
    for (int n = modes - strip; n < modes; ++n)
      for (int b = 0; b < block; ++b) mass += std::norm(v(n * block + b));
    out.worst_mass_margin = std::max(out.worst_mass_margin, 0.5 - std::abs(mass - 0.5));
    if (mass < tol.boundary_mass) ++out.dim;
  }
  out.worst_sigma_gap = (smallest_kept > 0.0) ? largest_null / smallest_kept : 0.0;
  return out;
}

}  // namespace

OracleResult toeplitz_index(const UnitaryLoop& loop, int cutoff, const Tolerances& tol) {
  if (cutoff < 2 * loop.band + 4) throw OracleError("toeplitz_index: cutoff below 2*band + 4");
  const int n = loop.size;
  const int modes = cutoff + 1;  // Hardy window {0..cutoff}
  const Eigen::Index dim = static_cast<Eigen::Index>(modes) * n;

  auto hardy_compress = [&](const FourierSymbol& f) {
    Matrix t = Matrix::Zero(dim, dim);
    for (const auto& [d, c] : f.coeffs())
      for (int m = 0; m < modes; ++m) {
        const int mm = m + d[0];
        if (0 <= mm && mm < modes) t.block(static_cast<Eigen::Index>(mm) * n, static_cast<Eigen::Index>(m) * n, n, n) += c;
      }
    return t;
  };

  const int strip = 2 * std::max(1, loop.band);
  const Matrix tg = hardy_compress(loop.fourier);
  const Matrix tgi = hardy_compress(loop.fourier_inverse);  // = (T_g)* for unitary g

  const StableKernel kp = stable_kernel(tg, modes, n, strip, tol);
  const StableKernel km = stable_kernel(tgi, modes, n, strip, tol);

  const double gap = std::max(kp.worst_sigma_gap, km.worst_sigma_gap);
  const double margin = std::max(kp.worst_mass_margin, km.worst_mass_margin);
  if (gap > tol.gap_ratio || margin > 0.4) {
    std::ostringstream os;
    os << "toeplitz_index: unstable kernel separation (sigma gap " << gap << ", mass margin "
       << margin << ")";
    throw OracleError(os.str());
  }

  OracleResult r = OracleResult::from_raw(static_cast<double>(kp.dim - km.dim), "toeplitz_index");
  r.defect = gap;
  return r;
}

// ---------------------------------------------------------------------------
// kernel index (Eq-3 style count at a point)
// ---------------------------------------------------------------------------

OracleResult kernel_index(const SpectralTriple& t, const Idempotent& e, const Tolerances& tol) {
  if (t.parity != Parity::Even) throw OracleError("kernel_index: triple must be even");
  if (e.algebra_size != t.amp)
    throw OracleError("kernel_index: idempotent size must match the amplified algebra");

  // compress e onto the lattice (acts on the amp factor, trivially on spinor)
  FourierSymbol esym = e.fourier;
  if (esym.dims() != t.lattice.dims) throw OracleError("kernel_index: base dimension mismatch");
  const Matrix ec = compress_symbol(esym, t);

  // ranges of the compressed idempotent within H+ and H- (gamma = +-1)
  const RealVector g = t.grading_diag();
  const Eigen::Index dim = t.dim();
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index i = 0; i < dim; ++i) (g(i) > 0 ? plus : minus).push_back(i);

  auto submatrix = [&](const Matrix& m, const std::vector<Eigen::Index>& rows,
                       const std::vector<Eigen::Index>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    return out;
  };

  const Matrix epp = submatrix(ec, plus, plus);
  const Matrix emm = submatrix(ec, minus, minus);

  auto range_basis = [&](const Matrix& eblk) {
    EigenResult eig = hermitian_eigen(eblk, tol);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
      if (eig.eigenvalues(i) > 0.5) ++r;
    Matrix v(eblk.rows(), r);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
      if (eig.eigenvalues(i) > 0.5) v.col(c++) = eig.eigenvectors.col(i);
    return v;
  };

  const Matrix vp = range_basis(epp);
  const Matrix vm = range_basis(emm);

  const Matrix d = t.dense_d();
  const Matrix dpm = submatrix(d, minus, plus);  // D+ : H+ -> H-
  const Matrix dmp = submatrix(d, plus, minus);  // D- : H- -> H+

  const Matrix mplus = vm.adjoint() * dpm * vp;
  const Matrix mminus = vp.adjoint() * dmp * vm;

  // stable kernel count: null singular vectors must avoid the mode boundary
  const int strip = 2;
  auto count = [&](const Matrix& m, const Matrix& range, const std::vector<Eigen::Index>& part) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double scale = (s.size() > 0) ? std::max(1.0, s(0)) : 1.0;
    const double thresh = 0.1 * scale / std::max<double>(1.0, static_cast<double>(t.lattice.cutoff[0]));
    Eigen::Index cnt = 0;
    double largest_null = 0.0, smallest_kept = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) >= thresh) {
        smallest_kept = (smallest_kept == 0.0) ? s(i) : std::min(smallest_kept, s(i));
        continue;
      }
      largest_null = std::max(largest_null, s(i));
      // lift the null vector to mode space and measure boundary mass
      const Vector lifted = range * svd.matrixV().col(i);
      double mass = 0.0, total = 0.0;
      for (std::size_t p = 0; p < part.size(); ++p) {
        const Eigen::Index full = part[p];
        const Eigen::Index mode = full / t.lattice.fiber;
        const Offset mo = t.lattice.mode_at(mode);
        const double w = std::norm(lifted(static_cast<Eigen::Index>(p)));
        total += w;
        bool boundary = false;
        for (int dd = 0; dd < t.lattice.dims; ++dd) {
          const auto du = static_cast<std::size_t>(dd);
          if (std::abs(mo[du]) > t.lattice.cutoff[du] - strip) boundary = true;
        }
        if (boundary) mass += w;
      }
      if (total > 0 && mass / total < tol.boundary_mass) ++cnt;
    }
    const double gap = (smallest_kept > 0.0) ? largest_null / smallest_kept : 0.0;
    return std::pair<Eigen::Index, double>(cnt, gap);
  };

  const auto [kp, gapp] = count(mplus, vp, plus);
  const auto [km, gapm] = count(mminus, vm, minus);
  const double gap = std::max(gapp, gapm);
  if (gap > tol.gap_ratio) {
    std::ostringstream os;
    os << "kernel_index: unreliable kernel count (gap ratio " << gap << ")";
    throw OracleError(os.str());
  }

  OracleResult r = OracleResult::from_raw(static_cast<double>(kp - km), "kernel_index");
  r.defect = gap;
  return r;
}

// ---------------------------------------------------------------------------
// Berry-curvature plaquette Chern number
// ---------------------------------------------------------------------------

namespace {

double berry_chern_impl(const Idempotent& e, par::Exec exec) {
  if (e.dims != 2) throw OracleError("berry_chern: projector must live over a 2-torus grid");
  const int j1 = e.grid_count[0], j2 = e.grid_count[1];
  if (j1 < 16 || j2 < 16) throw OracleError("berry_chern: grid below 16x16");

  // fixed-rank frame per point: eigenvectors of e with eigenvalue near 1
  Eigen::Index rank = -1;
  std::vector<Matrix> frames(static_cast<std::size_t>(j1) * j2);
  for (int a = 0; a < j1; ++a)
    for (int b = 0; b < j2; ++b) {
      EigenResult eig = hermitian_eigen(e.at(a, b));
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
        if (eig.eigenvalues(i) > 0.5) ++r;
      if (rank < 0) rank = r;
      if (r != rank) throw OracleError("berry_chern: projector rank varies over the grid");
      Matrix f(e.algebra_size, r);
      Eigen::Index c = 0;
      for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
        if (eig.eigenvalues(i) > 0.5) f.col(c++) = eig.eigenvectors.col(i);
      frames[static_cast<std::size_t>(a) * j2 + b] = std::move(f);
    }
  if (rank == 0) return 0.0;

  // plaquette sum of the phases of cyclic overlap determinants,
  // counterclockwise orientation in (theta1, theta2)
  const double total = par::sum_blocked<double>(
      static_cast<std::size_t>(j1) * j2, exec, [&](std::size_t p) -> double {
        const int a = static_cast<int>(p) / j2;
        const int b = static_cast<int>(p) % j2;
        const auto f = [&](int x, int y) -> const Matrix& {
          return frames[static_cast<std::size_t>((x + j1) % j1) * j2 + (y + j2) % j2];
        };
        const cx u1 = (f(a, b).adjoint() * f(a + 1, b)).determinant();
        const cx u2 = (f(a + 1, b).adjoint() * f(a + 1, b + 1)).determinant();
        const cx u3 = (f(a + 1, b + 1).adjoint() * f(a, b + 1)).determinant();
        const cx u4 = (f(a, b + 1).adjoint() * f(a, b)).determinant();
        const cx prod = u1 * u2 * u3 * u4;
        if (std::abs(prod) < 1e-12)
          throw OracleError("berry_chern: vanishing overlap (gap closure on grid)");
        return std::arg(prod);
      });
  return total / kTwoPi;
}

}  // namespace

OracleResult berry_chern(const Idempotent& projector, par::Exec exec) {
  return OracleResult::from_raw(berry_chern_impl(projector, exec), "berry_chern");
}

OracleResult ref::berry_chern(const Idempotent& projector) {
  return OracleResult::from_raw(berry_chern_impl(projector, par::Exec::Serial),
                                "berry_chern_serial");
}

}  // namespace ncindex
