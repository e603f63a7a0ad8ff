#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ncindex/triples.hpp"

namespace ncindex {

class KTheoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// exact rational (the ch-coefficient tables are exact for k <= 6)
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

// ch1 component coefficient of g^{-1} (x) g (x) ... in degree 2k+1: (-1)^k k!
Rational ch1_coefficient(int k);
// ch0 component coefficient of the 2k-form: 1/k!
Rational ch0_coefficient(int k);

// Smooth map S^1 -> U(N): uniform grid samples plus the matrix Fourier
// coefficients (kept consistent to rounding by construction).
struct UnitaryLoop {
  int size = 1;                      // N
  int band = 0;                      // max Fourier degree
  std::vector<Matrix> grid;          // samples at theta_j = 2 pi j / J
  FourierSymbol fourier;             // dims = 1
  FourierSymbol fourier_inverse;     // pointwise inverse g(theta)^{-1}
  bool exact_band = true;
  double tail_mass = 0.0;

  int samples() const { return static_cast<int>(grid.size()); }
  SymbolPair pair() const { return SymbolPair{fourier, fourier_inverse, exact_band, tail_mass}; }
  void check_invariants(const Tolerances& tol = default_tolerances()) const;
};

// g(theta) = diag(e^{i k_1 theta}, ..., e^{i k_N theta}) * u.
// J = 0 picks the default 4*band + 16 sample count.
UnitaryLoop loop_from_winding(const std::vector<int>& windings,
                              std::optional<Matrix> constant_factor = std::nullopt, int samples = 0);

// loop from explicit Fourier data; the inverse is always the compression of
// the pointwise inverse (computed on an oversampled grid), never a matrix
// inverse of the compression
UnitaryLoop loop_from_fourier(const FourierSymbol& f, double tail_tol,
                              const Tolerances& tol = default_tolerances());

// Sampled idempotent field over a torus base (dims 1 or 2).
struct Idempotent {
  int dims = 1;
  std::array<int, 2> grid_count{1, 1};
  std::vector<Matrix> samples;   // row-major over the grid
  int algebra_size = 1;          // n: samples are n x n
  bool self_adjoint = false;
  FourierSymbol fourier;         // tail-truncated transform of the samples
  double tail_mass = 0.0;

  const Matrix& at(int i, int j = 0) const {
    return samples[static_cast<std::size_t>(i) * grid_count[1] + static_cast<std::size_t>(j)];
  }
  void check_invariants(const Tolerances& tol = default_tolerances()) const;
};

// two-band projector field e = (1 - nhat.sigma)/2 with
// nhat ~ (sin t1, sin t2, m - cos t1 - cos t2); errors when the gap closes
// on the grid (m in {0, +-2} closes it exactly)
Idempotent qwz_projector(std::array<int, 2> grid, double m, double tail_tol = 1e-12,
                         const Tolerances& tol = default_tolerances());

// Miscenko idempotent e_ij = rho_i rho_j g_ij over a sampled 1-D base.
// partition: per-chart sampled functions rho_i (sum rho_i^2 = 1);
// transitions: g_ij sampled unitary fields (g_ii = 1, cocycle on overlaps).
Idempotent miscenko_idempotent(const std::vector<std::vector<double>>& partition,
                               const std::vector<std::vector<std::vector<Matrix>>>& transitions,
                               const Tolerances& tol = default_tolerances());

// loop over base x S^1 (dims = base dims + 1; circle direction first)
struct SuspendedLoop {
  FourierSymbol fourier;
  FourierSymbol fourier_inverse;
  int size = 1;
  bool exact_band = false;
  double tail_mass = 0.0;
  SymbolPair pair() const { return SymbolPair{fourier, fourier_inverse, exact_band, tail_mass}; }
};

// clutching loop g = e^{i theta} q + (1 - q) of a self-adjoint idempotent;
// unitary pointwise since q^2 = q = q*
SuspendedLoop bott_clutching_loop(const Idempotent& q,
                                  const Tolerances& tol = default_tolerances());

// dense block-Toeplitz compression of the loop acting on a triple with a
// circle factor (direction 0); unitary on the interior window
Matrix loop_as_element(const UnitaryLoop& loop, const SpectralTriple& t);

// hard representability bound used by the pairing prechecks for
// exactly-band-limited loops: cutoff >= 2 * band
bool cutoff_admits_band(const SpectralTriple& t, int band);

}  // namespace ncindex
