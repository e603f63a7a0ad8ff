#include "ncindex/pairing.hpp"

#include <cmath>
#include <sstream>

namespace ncindex {

namespace {

double factorial_d(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// interior-unitarity probe: apply compressed g then g^{-1} to a few central
// basis columns and compare with the identity
double unitarity_probe(const SpectralTriple& t, const SymbolApplier& fwd,
                       const SymbolApplier& inv) {
  const Eigen::Index dim = t.dim();
  const Eigen::Index nm = t.lattice.num_modes();
  auto wf = fwd.make_workspace();
  auto wi = inv.make_workspace();
  std::vector<cx> v(static_cast<std::size_t>(dim)), a(static_cast<std::size_t>(dim)),
      b(static_cast<std::size_t>(dim));
  // central mode (all indices 0) fiber columns plus a few neighbours
  const Offset zero{0, 0, 0};
  const Eigen::Index c0 = t.lattice.mode_index(zero);
  double worst = 0.0;
  const int probes = std::min<int>(t.lattice.fiber * 3, static_cast<int>(dim));
  for (int p = 0; p < probes; ++p) {
    const Eigen::Index col = (c0 * t.lattice.fiber + p) % dim;
    std::fill(v.begin(), v.end(), cx(0));
    v[static_cast<std::size_t>(col)] = 1.0;
    fwd.apply(v.data(), a.data(), *wf);
    inv.apply(a.data(), b.data(), *wi);
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const cx want = (i == col) ? cx(1.0) : cx(0.0);
      dmax = std::max(dmax, std::abs(b[static_cast<std::size_t>(i)] - want));
    }
    worst = std::max(worst, dmax);
  }
  (void)nm;
  return worst;
}

// T_n = Tr((gamma) F [F,b_0] ... [F,b_n]) for the alternating argument list
// (inv, fwd, inv, fwd, ...) at every requested degree in one pass
std::map<int, cx> alternating_chain_traces(const SpectralTriple& t, const SymbolPair& pair,
                                           const std::vector<int>& degrees, bool with_gamma,
                                           const PairingOptions& opts, const Tolerances& tol,
                                           double* quality_out) {
  std::map<int, cx> out;
  if (degrees.empty()) return out;
  const int nmax = degrees.back();

  FourierSymbol fwd = pair.fwd;
  FourierSymbol inv = pair.inv;
  double tail = 0.0;
  if (!pair.exact_band) {
    tail += fwd.truncate_tail(opts.tail_tol);
    tail += inv.truncate_tail(opts.tail_tol);
  }

  const bool dense = opts.force_dense || t.is_dense();
  if (dense) {
    const Matrix fm =
        sign_operator(t.dirac_op(), ZeroConvention::PlusOne, std::nullopt, tol).mat;
    const Matrix fc = compress_symbol(fwd, t);
    const Matrix ic = compress_symbol(inv, t);
    const Matrix xf = fm * fc - fc * fm;
    const Matrix xi = fm * ic - ic * fm;
    if (quality_out != nullptr) {
      // dense interior probe
      const Matrix u = fc * ic;
      double w = 0.0;
      const Eigen::Index dim = t.dim();
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
          const Offset mi = t.lattice.mode_at(i / t.lattice.fiber);
          const Offset mj = t.lattice.mode_at(j / t.lattice.fiber);
          bool interior = true;
          const Offset band = fwd.band();
          for (int d = 0; d < t.lattice.dims; ++d) {
            const auto du = static_cast<std::size_t>(d);
            if (std::abs(mi[du]) > t.lattice.cutoff[du] - band[du] ||
                std::abs(mj[du]) > t.lattice.cutoff[du] - band[du])
              interior = false;
          }
          if (!interior) continue;
          const cx want = (i == j) ? cx(1.0) : cx(0.0);
          w = std::max(w, std::abs(u(i, j) - want));
        }
      *quality_out = std::max(w, tail);
    }
    Matrix acc = fm;
    int applied = 0;
    const RealVector gamma = with_gamma ? t.grading_diag() : RealVector();
    for (int n : degrees) {
      while (applied <= n) {
        acc = acc * ((applied % 2 == 0) ? xi : xf);
        ++applied;
      }
      cx tr = 0.0;
      if (with_gamma)
        for (Eigen::Index i = 0; i < acc.rows(); ++i) tr += gamma(i) * acc(i, i);
      else
        tr = acc.trace();
      out[n] = tr;
    }
    return out;
  }

  // matrix-free path
  const std::vector<Matrix> blocks = fiber_sign_blocks(t, tol);
  SymbolApplier afwd(fwd, t.lattice, t.spinor);
  SymbolApplier ainv(inv, t.lattice, t.spinor);
  if (quality_out != nullptr) *quality_out = std::max(unitarity_probe(t, afwd, ainv), tail);

  // one multi-degree pass: per column run the full chain for nmax, reading
  // off the partial traces at each requested degree
  const Eigen::Index dim = t.dim();
  const Eigen::Index nm = t.lattice.num_modes();
  const int fiber = t.lattice.fiber;
  const int spinor = t.spinor;
  const int amp = t.amp;
  const RealVector gamma = with_gamma ? t.grading_diag() : RealVector();

  const int nthreads = (opts.exec == par::Exec::Serial) ? 1 : omp_get_max_threads();
  std::vector<std::unique_ptr<SymbolApplier::Workspace>> wfwd, winv;
  std::vector<std::vector<cx>> scratch(static_cast<std::size_t>(nthreads));
  for (int th = 0; th < nthreads; ++th) {
    wfwd.push_back(afwd.make_workspace());
    winv.push_back(ainv.make_workspace());
    scratch[static_cast<std::size_t>(th)].assign(3 * static_cast<std::size_t>(dim), cx(0));
  }

  auto apply_f = [&](const cx* in, cx* outv) {
    for (Eigen::Index m = 0; m < nm; ++m) {
      const Matrix& s = blocks[static_cast<std::size_t>(m)];
      const cx* vi = in + m * fiber;
      cx* vo = outv + m * fiber;
      for (int r = 0; r < spinor; ++r)
        for (int a = 0; a < amp; ++a) {
          cx acc2 = 0.0;
          for (int q = 0; q < spinor; ++q) acc2 += s(r, q) * vi[q * amp + a];
          vo[r * amp + a] = acc2;
        }
    }
  };

  // per-degree totals via deterministic blocked sums: accumulate per-column
  // contributions for every degree in one pass
  std::vector<cx> totals(degrees.size(), cx(0));
  const std::size_t nblocks =
      (static_cast<std::size_t>(dim) + par::kReduceBlock - 1) / par::kReduceBlock;
  std::vector<std::vector<cx>> partial(nblocks, std::vector<cx>(degrees.size(), cx(0)));

  par::for_index(nblocks, opts.exec, [&](std::size_t blk) {
    const int th = (opts.exec == par::Exec::Serial) ? 0 : omp_get_thread_num();
    cx* v = scratch[static_cast<std::size_t>(th)].data();
    cx* av = v + dim;
    cx* fv = av + dim;
    auto& wf = *wfwd[static_cast<std::size_t>(th)];
    auto& wi = *winv[static_cast<std::size_t>(th)];
    const std::size_t lo = blk * par::kReduceBlock;
    const std::size_t hi = std::min(static_cast<std::size_t>(dim), lo + par::kReduceBlock);
    std::vector<cx> acc(degrees.size(), cx(0));
    for (std::size_t col = lo; col < hi; ++col) {
      std::fill(v, v + dim, cx(0));
      v[col] = 1.0;
      // arguments (b_0 ... b_n) = (inv, fwd, inv, ...) act right-to-left:
      // apply X_{b_n} first. b_j uses inv for even j, fwd for odd j.
      int deg_slot = 0;
      for (int j = nmax; j >= 0; --j) {
        const bool use_inv = (j % 2 == 0);
        const SymbolApplier& a = use_inv ? ainv : afwd;
        auto& w = use_inv ? wi : wf;
        a.apply(v, av, w);
        apply_f(av, fv);
        apply_f(v, av);
        a.apply(av, v, w);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = fv[i] - v[i];
        // after applying X_{b_j}...X_{b_nmax}: if the remaining prefix for a
        // requested degree n is exactly X_{b_0}..X_{b_j-?}... a degree-n
        // trace needs the first n+1 arguments; since the alternating list
        // restricted to its last n+1 entries equals the degree-n list only
        // when nmax - j == n, read off at j = nmax - n.
        const int ncur = nmax - j;
        while (deg_slot < static_cast<int>(degrees.size()) &&
               degrees[static_cast<std::size_t>(deg_slot)] == ncur) {
          apply_f(v, fv);
          const cx diag = fv[col];
          acc[static_cast<std::size_t>(deg_slot)] +=
              with_gamma ? gamma(static_cast<Eigen::Index>(col)) * diag : diag;
          ++deg_slot;
        }
      }
    }
    partial[blk] = std::move(acc);
  });
  for (const auto& p : partial)
    for (std::size_t d = 0; d < degrees.size(); ++d) totals[d] += p[d];
  for (std::size_t d = 0; d < degrees.size(); ++d) out[degrees[static_cast<std::size_t>(d)]] = totals[d];
  return out;
}

}  // namespace

void PairingReport::finalize() {
  nearest_integer = std::llround(total.real());
  defect = std::abs(total - cx(static_cast<double>(nearest_integer), 0.0));
  status = (defect > 0.1 || quality > 0.1) ? ReportStatus::Warning : ReportStatus::Ok;
}

std::map<int, cx> odd_degree_estimates(const SpectralTriple& t, const SymbolPair& pair,
                                       int max_degree, const PairingOptions& opts,
                                       const Tolerances& tol) {
  if (t.parity == Parity::Even) throw PairingError("odd_pairing: triple must be odd");
  if (max_degree % 2 != 1) throw PairingError("odd_pairing: max_degree must be odd");
  if (max_degree > 5) throw PairingError("odd_pairing: degree cap is 5");
  const int floor = t.degree_floor(true);
  if (max_degree < floor) {
    std::ostringstream os;
    os << "odd_pairing: max_degree " << max_degree << " below the summability floor " << floor;
    throw PairingError(os.str());
  }
  std::vector<int> degrees;
  for (int n = floor; n <= max_degree; n += 2) degrees.push_back(n);

  std::map<int, cx> traces =
      alternating_chain_traces(t, pair, degrees, /*with_gamma=*/false, opts, tol, nullptr);
  std::map<int, cx> est;
  for (int n : degrees) {
    const int k = (n - 1) / 2;
    est[n] = factorial_d(k) / factorial_d(n) * opts.calibration.lambda(n) * traces[n];
  }
  return est;
}

PairingReport odd_pairing(const SpectralTriple& t, const SymbolPair& pair, int max_degree,
                          const PairingOptions& opts, const Tolerances& tol) {
  if (t.parity == Parity::Even) throw PairingError("odd_pairing: triple must be odd");
  if (max_degree % 2 != 1) throw PairingError("odd_pairing: max_degree must be odd");
  if (max_degree > 5) throw PairingError("odd_pairing: degree cap is 5");
  const int floor = t.degree_floor(true);
  if (max_degree < floor) {
    std::ostringstream os;
    os << "odd_pairing: max_degree " << max_degree << " below the summability floor " << floor;
    throw PairingError(os.str());
  }
  if (pair.exact_band) {
    const Offset band = pair.fwd.band();
    for (int d = 0; d < t.lattice.dims; ++d) {
      const auto du = static_cast<std::size_t>(d);
      if (t.lattice.cutoff[du] < 2 * band[du]) {
        std::ostringstream os;
        os << "odd_pairing: inadequate cutoff (direction " << d << ": cutoff "
           << t.lattice.cutoff[du] << " < 2 x band " << band[du] << ")";
        throw PairingError(os.str());
      }
    }
  }

  std::vector<int> degrees;
  for (int n = floor; n <= max_degree; n += 2) degrees.push_back(n);

  PairingReport rep;
  double quality = 0.0;
  std::map<int, cx> traces =
      alternating_chain_traces(t, pair, degrees, /*with_gamma=*/false, opts, tol,
                               t.is_dense() ? nullptr : &quality);
  std::map<int, cx> est;
  for (int n : degrees) {
    const int k = (n - 1) / 2;
    est[n] = factorial_d(k) / factorial_d(n) * opts.calibration.lambda(n) * traces[n];
  }
  cx prev = 0.0;
  for (int n : degrees) {
    rep.per_degree[n] = est[n] - prev;
    prev = est[n];
  }
  rep.total = prev;
  rep.quality = quality;
  {
    std::ostringstream os;
    os << "cutoff=" << t.lattice.cutoff[0];
    for (int d = 1; d < t.lattice.dims; ++d) os << "x" << t.lattice.cutoff[static_cast<std::size_t>(d)];
    os << " band=" << pair.fwd.max_band() << (pair.exact_band ? " exact" : " tail-truncated");
    if (pair.tail_mass > 0) os << " tail_mass=" << pair.tail_mass;
    rep.cutoff_note = os.str();
  }
  rep.finalize();
  return rep;
}

PairingReport odd_pairing(const SpectralTriple& t, const UnitaryLoop& loop, int max_degree,
                          const PairingOptions& opts, const Tolerances& tol) {
  SymbolPair pair = loop.pair();
  if (t.lattice.dims > 1) {
    // embed the 1-D loop along the circle direction
    auto embed = [&](const FourierSymbol& f) {
      FourierSymbol g(t.lattice.dims, f.block());
      for (const auto& [d, c] : f.coeffs()) g.add(Offset{d[0], 0, 0}, c);
      return g;
    };
    pair.fwd = embed(pair.fwd);
    pair.inv = embed(pair.inv);
  }
  if (loop.size != t.amp)
    throw PairingError("odd_pairing: loop matrix size must match the triple's amplification");
  return odd_pairing(t, pair, max_degree, opts, tol);
}

PairingReport even_pairing(const SpectralTriple& t, const Idempotent& e, int max_degree,
                           const PairingOptions& opts, const Tolerances& tol) {
  if (t.parity != Parity::Even) throw PairingError("even_pairing: triple must be even");
  if (max_degree % 2 != 0) throw PairingError("even_pairing: max_degree must be even");
  if (max_degree > 4) throw PairingError("even_pairing: degree cap is 4");
  const SpectralTriple* tp = &t;
  SpectralTriple amplified;
  if (e.algebra_size != t.amp) {
    if (t.amp != 1 || e.algebra_size < 1)
      throw PairingError("even_pairing: idempotent size incompatible with the triple");
    amplified = matrix_amplify(t, e.algebra_size);
    tp = &amplified;
  }
  const int floor = tp->degree_floor(false);
  if (max_degree < floor) {
    std::ostringstream os;
    os << "even_pairing: max_degree " << max_degree << " below the summability floor " << floor;
    throw PairingError(os.str());
  }
  if (e.fourier.dims() != tp->lattice.dims)
    throw PairingError("even_pairing: idempotent base dimension mismatch");

  FourierSymbol esym = e.fourier;
  double tail = e.tail_mass + esym.truncate_tail(opts.tail_tol);

  std::vector<int> degrees;
  for (int n = floor; n <= max_degree; n += 2) degrees.push_back(n);

  // symbol pair (e, e): the alternating chain with fwd = inv = e gives
  // exactly the (e, ..., e) argument list
  SymbolPair pair{esym, esym, false, tail};

  PairingReport rep;
  double quality = 0.0;
  std::map<int, cx> traces = alternating_chain_traces(*tp, pair, degrees, /*with_gamma=*/true,
                                                      opts, tol, &quality);

  // degree-0 term is the plain supertrace of the compressed idempotent
  std::map<int, cx> est;
  for (int n : degrees) {
    if (n == 0) {
      const Matrix ec = compress_symbol(esym, *tp);
      const RealVector g = tp->grading_diag();
      cx tr = 0.0;
      for (Eigen::Index i = 0; i < ec.rows(); ++i) tr += g(i) * ec(i, i);
      est[n] = opts.calibration.mu(0) * tr;
      continue;
    }
    const double half_fact = [&] {
      double f = 1.0;
      for (int i = 2; i <= n / 2; ++i) f *= i;
      return 0.5 * f;
    }();
    est[n] = opts.calibration.mu(n) * half_fact * traces[n];
  }
  cx prev = 0.0;
  bool first = true;
  for (int n : degrees) {
    if (first) {
      rep.per_degree[n] = est[n];
      first = false;
    } else {
      rep.per_degree[n] = est[n] - prev;
    }
    prev = est[n];
  }
  rep.total = prev;
  rep.quality = std::max(quality, tail);
  {
    std::ostringstream os;
    os << "cutoff=" << tp->lattice.cutoff[0];
    for (int d = 1; d < tp->lattice.dims; ++d)
      os << "x" << tp->lattice.cutoff[static_cast<std::size_t>(d)];
    os << " band=" << esym.max_band() << " tail-truncated tail_mass=" << tail;
    rep.cutoff_note = os.str();
  }
  rep.finalize();
  return rep;
}

PairingReport anomaly_integral(const SpectralTriple& base, const SuspendedLoop& loop,
                               int circle_cutoff, int max_degree, const PairingOptions& opts,
                               const Tolerances& tol) {
  if (base.parity != Parity::Even) throw PairingError("anomaly_integral: base triple must be even");
  if (loop.size % base.amp != 0)
    throw PairingError("anomaly_integral: loop size incompatible with the base algebra");
  const int factor = loop.size / base.amp;
  SpectralTriple amplified = (factor > 1) ? matrix_amplify(base, factor) : base;
  SpectralTriple product = product_with_circle(amplified, circle_cutoff);
  if (loop.fourier.dims() != product.lattice.dims)
    throw PairingError("anomaly_integral: loop dimensions must match base x circle");
  return odd_pairing(product, loop.pair(), max_degree, opts, tol);
}

}  // namespace ncindex
