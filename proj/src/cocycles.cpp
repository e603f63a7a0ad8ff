#include "ncindex/cocycles.hpp"

#include <cmath>
#include <sstream>

namespace ncindex {

namespace {

double half_factorial_norm(int n) {
  // (1/2) (n/2)!
  double f = 1.0;
  for (int i = 2; i <= n / 2; ++i) f *= i;
  return 0.5 * f;
}

}  // namespace

void ChernCocycle::check_invariants(const Tolerances& tol) const {
  const Matrix& m = f.mat;
  const Eigen::Index d = m.rows();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.unitarity)
    throw CocycleError("cocycle F is not self-adjoint");
  if ((m * m - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol.unitarity)
    throw CocycleError("cocycle F does not square to 1");
  if (parity == Parity::Even) {
    if (f.grading.size() == 0) throw CocycleError("even cocycle requires a grading");
    if (odd_defect(m, f.grading) > tol.unitarity)
      throw CocycleError("even cocycle requires gamma F = -F gamma");
  }
}

ChernCocycle even_chern_cocycle(const SpectralTriple& t, int degree, const Tolerances& tol) {
  if (degree < 0 || degree % 2 != 0) throw CocycleError("even cocycle degree must be even");
  if (t.parity != Parity::Even) throw CocycleError("even cocycle needs a graded triple");
  ChernCocycle c;
  c.degree = degree;
  c.parity = Parity::Even;
  c.f = sign_operator(t.dirac_op(), ZeroConvention::PlusOne, std::nullopt, tol);
  c.normalization = half_factorial_norm(degree);
  c.check_invariants(tol);
  return c;
}

ChernCocycle odd_chern_cocycle(const SpectralTriple& t, int degree, const Calibration& calib,
                               const Tolerances& tol) {
  if (degree < 1 || degree % 2 != 1) throw CocycleError("odd cocycle degree must be odd");
  if (t.parity == Parity::Even) throw CocycleError("odd cocycle needs an odd (ungraded) triple");
  ChernCocycle c;
  c.degree = degree;
  c.parity = Parity::Odd;
  c.f = sign_operator(t.dirac_op(), ZeroConvention::PlusOne, std::nullopt, tol);
  c.normalization = calib.lambda(degree);
  c.check_invariants(tol);
  return c;
}

cx chain_trace_dense(const Matrix& f, const std::vector<const Matrix*>& args,
                     const RealVector* gamma) {
  Matrix acc = f;
  for (const Matrix* a : args) {
    const Matrix x = f * (*a) - (*a) * f;
    acc = acc * x;
  }
  if (gamma == nullptr) return acc.trace();
  cx tr = 0.0;
  for (Eigen::Index i = 0; i < acc.rows(); ++i) tr += (*gamma)(i)*acc(i, i);
  return tr;
}

cx tau_even(const ChernCocycle& c, const std::vector<GradedOperator>& args, const Tolerances& tol) {
  if (c.degree % 2 != 0) throw CocycleError("tau_even: degree must be even");
  if (c.parity != Parity::Even) throw CocycleError("tau_even: cocycle is not even");
  if (static_cast<int>(args.size()) != c.degree + 1)
    throw CocycleError("tau_even: arity must be degree + 1");
  std::vector<const Matrix*> ptrs;
  ptrs.reserve(args.size());
  for (const GradedOperator& a : args) {
    if (a.parity != Parity::Even) throw CocycleError("tau_even: arguments must be even");
    if (a.dim() != c.f.dim()) throw CocycleError("tau_even: dimension mismatch");
    ptrs.push_back(&a.mat);
  }
  (void)tol;
  return c.normalization * chain_trace_dense(c.f.mat, ptrs, &c.f.grading);
}

cx tau_odd(const ChernCocycle& c, const std::vector<Matrix>& args) {
  if (c.degree % 2 != 1) throw CocycleError("tau_odd: degree must be odd");
  if (static_cast<int>(args.size()) != c.degree + 1)
    throw CocycleError("tau_odd: arity must be degree + 1");
  std::vector<const Matrix*> ptrs;
  ptrs.reserve(args.size());
  for (const Matrix& a : args) {
    if (a.rows() != c.f.dim()) throw CocycleError("tau_odd: dimension mismatch");
    ptrs.push_back(&a);
  }
  return c.normalization * chain_trace_dense(c.f.mat, ptrs, nullptr);
}

cx phi_from_tau(int n, cx tau_value) {
  if (n < 0) throw CocycleError("phi_from_tau: negative degree");
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign / fact * tau_value;
}

double check_cyclicity(const ChernCocycle& c, const std::vector<GradedOperator>& args,
                       const Tolerances& tol) {
  if (static_cast<int>(args.size()) != c.degree + 1)
    throw CocycleError("check_cyclicity: arity must be degree + 1");
  auto eval = [&](const std::vector<GradedOperator>& a) {
    if (c.parity == Parity::Even) return tau_even(c, a, tol);
    std::vector<Matrix> plain;
    plain.reserve(a.size());
    for (const GradedOperator& g : a) plain.push_back(g.mat);
    return tau_odd(c, plain);
  };
  const cx lhs = eval(args);
  std::vector<GradedOperator> rotated;
  rotated.reserve(args.size());
  rotated.push_back(args.back());
  for (std::size_t i = 0; i + 1 < args.size(); ++i) rotated.push_back(args[i]);
  const cx rhs = eval(rotated);
  const double sign = (c.degree % 2 == 0) ? 1.0 : -1.0;
  return std::abs(lhs - sign * rhs);
}

double check_hochschild(const ChernCocycle& c, const SpectralTriple& t,
                        const std::vector<FourierSymbol>& args, const Tolerances& tol) {
  const int n = c.degree;
  if (static_cast<int>(args.size()) != n + 2)
    throw CocycleError("check_hochschild: arity must be degree + 2");

  // compress individual symbols once
  std::vector<Matrix> compressed;
  compressed.reserve(args.size());
  for (const FourierSymbol& f : args) compressed.push_back(f.compress(t.lattice, t.spinor));

  auto psi = [&](const std::vector<const Matrix*>& a) -> cx {
    if (c.parity == Parity::Even)
      return c.normalization * chain_trace_dense(c.f.mat, a, &c.f.grading);
    return c.normalization * chain_trace_dense(c.f.mat, a, nullptr);
  };

  cx acc = 0.0;
  // sum_{j=0}^{n} (-1)^j psi(a_0, ..., a_j a_{j+1}, ..., a_{n+1})
  for (int j = 0; j <= n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    // product in the symbol algebra, then compressed
    FourierSymbol prod = args[ju].product(args[ju + 1]);
    Matrix prodc = prod.compress(t.lattice, t.spinor);
    std::vector<const Matrix*> a;
    a.reserve(static_cast<std::size_t>(n + 1));
    for (std::size_t i = 0; i < ju; ++i) a.push_back(&compressed[i]);
    a.push_back(&prodc);
    for (std::size_t i = ju + 2; i < args.size(); ++i) a.push_back(&compressed[i]);
    acc += ((j % 2 == 0) ? 1.0 : -1.0) * psi(a);
  }
  // + (-1)^{n+1} psi(a_{n+1} a_0, a_1, ..., a_n)
  {
    FourierSymbol prod = args.back().product(args.front());
    Matrix prodc = prod.compress(t.lattice, t.spinor);
    std::vector<const Matrix*> a;
    a.reserve(static_cast<std::size_t>(n + 1));
    a.push_back(&prodc);
    for (std::size_t i = 1; i <= static_cast<std::size_t>(n); ++i) a.push_back(&compressed[i]);
    acc += (((n + 1) % 2 == 0) ? 1.0 : -1.0) * psi(a);
  }
  (void)tol;
  return std::abs(acc);
}

std::vector<Matrix> fiber_sign_blocks(const SpectralTriple& t, const Tolerances& tol) {
  if (t.is_dense()) throw CocycleError("fiber_sign_blocks: triple has a dense Dirac operator");
  const Eigen::Index nm = t.lattice.num_modes();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(nm));
  const RealVector fiber_gamma = t.spinor_gamma.diagonal().real();
  for (Eigen::Index i = 0; i < nm; ++i) {
    const Matrix& blk = t.dirac_fibers[static_cast<std::size_t>(i)];
    GradedOperator d = (t.parity == Parity::Even)
                           ? GradedOperator::odd(blk, fiber_gamma, tol)
                           : GradedOperator::ungraded(blk);
    out.push_back(sign_operator(d, ZeroConvention::PlusOne, std::nullopt, tol).mat);
  }
  return out;
}

cx chain_trace_apply(const SpectralTriple& t, const std::vector<Matrix>& sign_blocks,
                     const std::vector<const SymbolApplier*>& args, bool with_gamma,
                     par::Exec exec) {
  const Eigen::Index dim = t.dim();
  const Eigen::Index nm = t.lattice.num_modes();
  const int fiber = t.lattice.fiber;
  const int spinor = t.spinor;
  const int amp = t.amp;
  if (static_cast<Eigen::Index>(sign_blocks.size()) != nm)
    throw CocycleError("chain_trace_apply: sign block count mismatch");

  // distinct appliers -> workspace slots
  std::vector<const SymbolApplier*> distinct;
  std::vector<std::size_t> slot(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::size_t s = distinct.size();
    for (std::size_t d = 0; d < distinct.size(); ++d)
      if (distinct[d] == args[i]) { s = d; break; }
    if (s == distinct.size()) distinct.push_back(args[i]);
    slot[i] = s;
  }
  const int nthreads = (exec == par::Exec::Serial) ? 1 : omp_get_max_threads();
  std::vector<std::vector<std::unique_ptr<SymbolApplier::Workspace>>> ws(
      static_cast<std::size_t>(nthreads));
  for (int th = 0; th < nthreads; ++th)
    for (const SymbolApplier* a : distinct)
      ws[static_cast<std::size_t>(th)].push_back(a->make_workspace());

  const RealVector gamma = with_gamma ? t.grading_diag() : RealVector();

  auto apply_f = [&](const cx* in, cx* out) {
    for (Eigen::Index m = 0; m < nm; ++m) {
      const Matrix& s = sign_blocks[static_cast<std::size_t>(m)];
      const cx* vi = in + m * fiber;
      cx* vo = out + m * fiber;
      for (int r = 0; r < spinor; ++r)
        for (int a = 0; a < amp; ++a) {
          cx acc = 0.0;
          for (int q = 0; q < spinor; ++q) acc += s(r, q) * vi[q * amp + a];
          vo[r * amp + a] = acc;
        }
    }
  };

  // per-thread scratch (three dim-length vectors each)
  std::vector<std::vector<cx>> scratch(static_cast<std::size_t>(nthreads));
  for (auto& s : scratch) s.assign(3 * static_cast<std::size_t>(dim), cx(0));

  const cx total = par::sum_blocked<cx>(
      static_cast<std::size_t>(dim), exec, [&](std::size_t col) -> cx {
        const int th = (exec == par::Exec::Serial) ? 0 : omp_get_thread_num();
        auto& wss = ws[static_cast<std::size_t>(th)];
        cx* v = scratch[static_cast<std::size_t>(th)].data();
        cx* av = v + dim;
        cx* fv = av + dim;
        std::fill(v, v + dim, cx(0));
        v[col] = 1.0;
        // rightmost argument acts first
        for (std::size_t j = args.size(); j-- > 0;) {
          const SymbolApplier& a = *args[j];
          auto& w = *wss[slot[j]];
          a.apply(v, av, w);      // A v
          apply_f(av, fv);        // F A v
          apply_f(v, av);         // F v
          a.apply(av, v, w);      // A F v  (reuse v as output)
          for (Eigen::Index i = 0; i < dim; ++i) v[i] = fv[i] - v[i];
        }
        apply_f(v, fv);
        const cx diag = fv[col];
        if (!with_gamma) return diag;
        return gamma(static_cast<Eigen::Index>(col)) * diag;
      });
  return total;
}

}  // namespace ncindex
