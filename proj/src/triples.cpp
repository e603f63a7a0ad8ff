#include "ncindex/triples.hpp"

#include <cmath>
#include <sstream>

namespace ncindex {

namespace {

Matrix pauli(int i) {
  Matrix s(2, 2);
  switch (i) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cx(0, -1), cx(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

}  // namespace

Matrix SpectralTriple::dense_d() const {
  if (dense_dirac) return *dense_dirac;
  const int f = lattice.fiber;
  const Eigen::Index nm = lattice.num_modes();
  const Matrix id_amp = Matrix::Identity(amp, amp);
  Matrix d = Matrix::Zero(dim(), dim());
  for (Eigen::Index i = 0; i < nm; ++i)
    d.block(i * f, i * f, f, f) = kron(dirac_fibers[static_cast<std::size_t>(i)], id_amp);
  return d;
}

RealVector SpectralTriple::grading_diag() const {
  if (parity != Parity::Even) return RealVector();
  RealVector g(dim());
  const int f = lattice.fiber;
  const Eigen::Index nm = lattice.num_modes();
  for (Eigen::Index i = 0; i < nm; ++i)
    for (int s = 0; s < spinor; ++s)
      for (int a = 0; a < amp; ++a) g(i * f + s * amp + a) = spinor_gamma(s, s).real();
  return g;
}

GradedOperator SpectralTriple::dirac_op() const {
  if (parity == Parity::Even) return GradedOperator::odd(dense_d(), grading_diag());
  return GradedOperator::ungraded(dense_d());
}

GradedOperator SpectralTriple::gamma_op() const {
  if (parity != Parity::Even) throw TripleError("odd triple has no grading operator");
  const RealVector g = grading_diag();
  return GradedOperator::even(Matrix(g.cast<cx>().asDiagonal()), g);
}

int SpectralTriple::degree_floor(bool odd_degree) const {
  int n = odd_degree ? 1 : 0;
  while (static_cast<double>(n) <= summability_p - 1.0) n += 2;
  return n;
}

void SpectralTriple::check_invariants(const Tolerances& tol) const {
  const Matrix d = dense_d();
  const double herm = (d - d.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermiticity) throw TripleError("Dirac operator is not Hermitian");
  if (parity == Parity::Even) {
    const RealVector g = grading_diag();
    if (odd_defect(d, g) > tol.parity) throw TripleError("gamma D != -D gamma");
    for (const auto& [name, f] : algebra) {
      const Matrix a = f.compress(lattice, spinor);
      if (even_defect(a, g) > tol.parity)
        throw TripleError("algebra generator '" + name + "' is not even");
    }
  }
}

GaugePotential GaugePotential::make(GradedOperator op, const Tolerances& tol) {
  const double herm = (op.mat - op.mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermiticity) throw TripleError("gauge potential must be self-adjoint");
  if (op.parity == Parity::Even) throw TripleError("gauge potential must be odd or ungraded");
  GaugePotential a;
  a.norm_bound = operator_norm(op.mat);
  a.op = std::move(op);
  return a;
}

SpectralTriple circle_triple(int mode_cutoff) {
  if (mode_cutoff < 1) throw TripleError("circle_triple: cutoff must be >= 1");
  SpectralTriple t;
  t.parity = Parity::Ungraded;
  t.lattice = ModeLattice{1, Offset{mode_cutoff, 0, 0}, 1};
  t.spinor = 1;
  t.dirac_fibers.reserve(static_cast<std::size_t>(t.lattice.num_modes()));
  for (Eigen::Index i = 0; i < t.lattice.num_modes(); ++i) {
    const Offset m = t.lattice.mode_at(i);
    t.dirac_fibers.push_back(Matrix::Constant(1, 1, cx(m[0], 0)));
  }
  t.spinor_gamma = Matrix::Identity(1, 1);
  t.summability_p = 1.01;
  t.truncation.mode_cutoff = Offset{mode_cutoff, 0, 0};
  add_algebra_generator(t, "u", FourierSymbol::phase(1, 1, 0, 1));
  return t;
}

SpectralTriple torus2_dirac(int mode_cutoff, std::optional<double> mass_shift) {
  if (mode_cutoff < 1) throw TripleError("torus2_dirac: cutoff must be >= 1");
  SpectralTriple t;
  t.parity = Parity::Even;
  t.lattice = ModeLattice{2, Offset{mode_cutoff, mode_cutoff, 0}, 2};
  t.spinor = 2;
  const Matrix s1 = pauli(1), s2 = pauli(2), s3 = pauli(3);
  t.dirac_fibers.reserve(static_cast<std::size_t>(t.lattice.num_modes()));
  for (Eigen::Index i = 0; i < t.lattice.num_modes(); ++i) {
    const Offset m = t.lattice.mode_at(i);
    Matrix blk = static_cast<double>(m[0]) * s1 + static_cast<double>(m[1]) * s2;
    if (mass_shift) blk += *mass_shift * s3;
    t.dirac_fibers.push_back(blk);
  }
  t.spinor_gamma = s3;
  t.summability_p = 2.01;
  t.truncation.mode_cutoff = Offset{mode_cutoff, mode_cutoff, 0};
  add_algebra_generator(t, "u1", FourierSymbol::phase(2, 1, 0, 1));
  add_algebra_generator(t, "u2", FourierSymbol::phase(2, 1, 1, 1));
  return t;
}

SpectralTriple two_point_triple(double mass) {
  SpectralTriple t;
  t.parity = Parity::Even;
  t.lattice = ModeLattice{1, Offset{0, 0, 0}, 2};  // single mode, 2-dim fiber
  t.spinor = 2;
  t.dirac_fibers.push_back(mass * pauli(1));
  t.spinor_gamma = pauli(3);
  t.summability_p = 0.25;
  return t;
}

SpectralTriple trivial_plus_triple() {
  SpectralTriple t;
  t.parity = Parity::Even;
  t.lattice = ModeLattice{1, Offset{0, 0, 0}, 1};
  t.spinor = 1;
  t.dirac_fibers.push_back(Matrix::Zero(1, 1));
  t.spinor_gamma = Matrix::Identity(1, 1);  // H = H^+ only
  t.summability_p = 0.25;
  return t;
}

SpectralTriple matrix_amplify(const SpectralTriple& t, int n) {
  if (n < 1) throw TripleError("matrix_amplify: N must be >= 1");
  if (t.is_dense()) throw TripleError("matrix_amplify: dense triples not supported");
  if (n == 1) return t;
  SpectralTriple out = t;
  out.amp = t.amp * n;
  out.lattice.fiber = t.lattice.fiber * n;
  // existing algebra generators act as before, embedded block-diagonally
  const Matrix idn = Matrix::Identity(n, n);
  for (auto& [name, f] : out.algebra) {
    FourierSymbol g(f.dims(), f.block() * n);
    for (const auto& [d, c] : f.coeffs()) g.add(d, kron(c, idn));
    f = g;
  }
  return out;
}

SpectralTriple product_with_circle(const SpectralTriple& base, int circle_cutoff) {
  if (base.parity != Parity::Even)
    throw TripleError("product_with_circle: base triple must be even (graded)");
  if (base.is_dense()) throw TripleError("product_with_circle: dense base not supported");
  if (circle_cutoff < 1) throw TripleError("product_with_circle: cutoff must be >= 1");
  if (base.lattice.dims > 2) throw TripleError("product_with_circle: too many directions");

  SpectralTriple out;
  out.parity = Parity::Ungraded;  // odd triple
  out.lattice.dims = base.lattice.dims + 1;
  out.lattice.cutoff = Offset{circle_cutoff, base.lattice.cutoff[0], base.lattice.cutoff[1]};
  out.lattice.fiber = base.lattice.fiber;
  out.spinor = base.spinor;
  out.amp = base.amp;
  out.spinor_gamma = base.spinor_gamma;
  out.summability_p = base.summability_p + 1.0;
  out.truncation.mode_cutoff = out.lattice.cutoff;
  out.truncation.symbol_tail = base.truncation.symbol_tail;

  // D'(n, k) = n * gamma + D(k) per fiber
  const Eigen::Index nm = out.lattice.num_modes();
  out.dirac_fibers.reserve(static_cast<std::size_t>(nm));
  for (Eigen::Index i = 0; i < nm; ++i) {
    const Offset m = out.lattice.mode_at(i);
    const Offset bm{m[1], m[2], 0};
    const Eigen::Index bi = base.lattice.mode_index(bm);
    out.dirac_fibers.push_back(static_cast<double>(m[0]) * base.spinor_gamma +
                               base.dirac_fibers[static_cast<std::size_t>(bi)]);
  }

  // algebra: base generators become theta-independent suspended symbols,
  // plus the circle phase itself
  for (const auto& [name, f] : base.algebra) {
    FourierSymbol g(out.lattice.dims, f.block());
    for (const auto& [d, c] : f.coeffs()) g.add(Offset{0, d[0], d[1]}, c);
    add_algebra_generator(out, name, g);
  }
  add_algebra_generator(out, "u_circle", FourierSymbol::phase(out.lattice.dims, base.amp, 0, 1));
  return out;
}

SpectralTriple perturb(const SpectralTriple& t, const GaugePotential& a, const Tolerances& tol) {
  if (a.op.dim() != t.dim()) throw TripleError("perturb: dimension mismatch");
  if (t.parity == Parity::Even) {
    if (a.op.parity != Parity::Odd) throw TripleError("perturb: even triple needs an odd potential");
    if ((a.op.grading - t.grading_diag()).cwiseAbs().maxCoeff() > 0)
      throw TripleError("perturb: grading mismatch");
  }
  SpectralTriple out = t;
  Matrix d = t.dense_d() + a.op.mat;
  const double herm = (d - d.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermiticity) throw TripleError("perturb: D + A is not Hermitian");
  out.dense_dirac = std::move(d);
  return out;
}

GaugePotential gauge_transform(const GradedOperator& d, const GaugePotential& a,
                               const GradedOperator& g, const Tolerances& tol) {
  const Matrix& gm = g.mat;
  const double unit = (gm.adjoint() * gm - Matrix::Identity(gm.rows(), gm.cols())).cwiseAbs().maxCoeff();
  if (unit > tol.unitarity) {
    std::ostringstream os;
    os << "gauge_transform: g is not unitary (defect " << unit << ")";
    throw TripleError(os.str());
  }
  if (d.parity == Parity::Odd && g.parity != Parity::Even)
    throw TripleError("gauge_transform: g must be even on a graded space");
  const Matrix gi = gm.adjoint();  // unitary inverse
  Matrix ag = gi * a.op.mat * gm + gi * (d.mat * gm - gm * d.mat);
  ag = 0.5 * (ag + ag.adjoint());  // symmetrize rounding noise
  GradedOperator op;
  op.mat = std::move(ag);
  op.parity = a.op.parity;
  op.grading = a.op.grading;
  return GaugePotential::make(std::move(op), tol);
}

Matrix compress_symbol(const FourierSymbol& symbol, const SpectralTriple& t) {
  const Offset band = symbol.band();
  for (int d = 0; d < t.lattice.dims; ++d) {
    const auto du = static_cast<std::size_t>(d);
    if (band[du] > t.lattice.cutoff[du])
      throw TripleError("compress_symbol: band exceeds mode cutoff");
  }
  return symbol.compress(t.lattice, t.spinor);
}

void add_algebra_generator(SpectralTriple& t, const std::string& name, const FourierSymbol& f) {
  const Offset band = f.band();
  for (int d = 0; d < t.lattice.dims; ++d) {
    const auto du = static_cast<std::size_t>(d);
    if (band[du] > t.lattice.cutoff[du])
      throw TripleError("algebra generator band exceeds mode cutoff");
  }
  t.truncation.symbol_band_limit = std::max(t.truncation.symbol_band_limit, f.max_band());
  t.algebra.emplace_back(name, f);
}

}  // namespace ncindex
