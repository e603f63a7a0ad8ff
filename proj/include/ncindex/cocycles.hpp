#pragma once

#include <vector>

#include "ncindex/calibration.hpp"
#include "ncindex/fourier_apply.hpp"
#include "ncindex/parallel.hpp"
#include "ncindex/triples.hpp"

namespace ncindex {

class CocycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chern character cocycle of the bounded picture (H, F): degree, the sign
// operator F (F = F*, F^2 = 1, anticommuting with gamma in the even case)
// and the scalar normalization in front of the trace.
struct ChernCocycle {
  int degree = 0;
  Parity parity = Parity::Ungraded;  // Even: supertrace with gamma; Odd: plain trace
  GradedOperator f;
  double normalization = 1.0;  // even: (1/2)(n/2)!, odd: lambda_n

  void check_invariants(const Tolerances& tol = default_tolerances()) const;
};

// F = sign(D) of the triple's Dirac operator, normalization (1/2)(n/2)!
ChernCocycle even_chern_cocycle(const SpectralTriple& t, int degree,
                                const Tolerances& tol = default_tolerances());
// odd cocycle with the calibrated lambda_n
ChernCocycle odd_chern_cocycle(const SpectralTriple& t, int degree,
                               const Calibration& calib = Calibration::defaults(),
                               const Tolerances& tol = default_tolerances());

// tau(a_0, ..., a_n) = normalization * Tr_s(F [F,a_0] ... [F,a_n]);
// all arguments must be even. Errors on odd degree or parity mismatch.
cx tau_even(const ChernCocycle& c, const std::vector<GradedOperator>& args,
            const Tolerances& tol = default_tolerances());

// odd analogue with a plain trace over invertible algebra elements
cx tau_odd(const ChernCocycle& c, const std::vector<Matrix>& args);

// (b,B) normalization bridge phi_n = (-1)^{floor(n/2)} / n! * psi
cx phi_from_tau(int n, cx tau_value);

// |psi(a_0..a_n) - (-1)^n psi(a_n, a_0..a_{n-1})|
double check_cyclicity(const ChernCocycle& c, const std::vector<GradedOperator>& args,
                       const Tolerances& tol = default_tolerances());

// Hochschild coboundary magnitude |(b psi)(f_0..f_{n+1})| with the argument
// products taken in the symbol algebra (exact Fourier convolution) before
// compression; measures the boundary-window leakage of the truncation
double check_hochschild(const ChernCocycle& c, const SpectralTriple& t,
                        const std::vector<FourierSymbol>& args,
                        const Tolerances& tol = default_tolerances());

// --- trace kernels ---

// serial dense reference: Tr((gamma) F [F,a_0] ... [F,a_n])
cx chain_trace_dense(const Matrix& f, const std::vector<const Matrix*>& args,
                     const RealVector* gamma);

// per-mode sign blocks of a fiber-diagonal Dirac (spinor x spinor, before
// amplification), kernel fibers handled by the plus-one / swap convention
std::vector<Matrix> fiber_sign_blocks(const SpectralTriple& t,
                                      const Tolerances& tol = default_tolerances());

// matrix-free production kernel: same trace with the arguments applied
// through compressed-symbol FFT appliers, parallel over basis columns
cx chain_trace_apply(const SpectralTriple& t, const std::vector<Matrix>& sign_blocks,
                     const std::vector<const SymbolApplier*>& args, bool with_gamma,
                     par::Exec exec = par::default_exec());

}  // namespace ncindex
