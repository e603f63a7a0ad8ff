#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncindex/fourier.hpp"
#include "ncindex/linalg.hpp"

namespace ncindex {

class TripleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// truncation metadata carried by every constructed triple
struct Truncation {
  Offset mode_cutoff{};
  int symbol_band_limit = 0;   // largest band among registered algebra symbols
  double symbol_tail = 0.0;    // recorded tail mass of non-band-limited symbols
};

// Finitely truncated spectral triple (A, H, D). H is either a mode lattice
// with a fiber (constructors below) or a plain dense space (custom/perturbed
// triples). For lattice triples the Dirac operator is fiber-diagonal: one
// Hermitian fiber block per mode.
struct SpectralTriple {
  Parity parity = Parity::Ungraded;  // Even = graded triple, else odd triple

  ModeLattice lattice;
  int spinor = 1;  // grading acts on this fiber factor
  int amp = 1;     // matrix amplification M_amp(A); fiber = spinor * amp
  std::vector<Matrix> dirac_fibers;    // per mode, spinor x spinor (pre-amplification)
  std::optional<Matrix> dense_dirac;   // overrides fiber blocks when present
  Matrix spinor_gamma;                 // grading on the spinor factor (even triples)

  double summability_p = 1.0;
  Truncation truncation;
  std::vector<std::pair<std::string, FourierSymbol>> algebra;  // named generators

  Eigen::Index dim() const { return lattice.dim(); }
  bool is_dense() const { return dense_dirac.has_value(); }

  Matrix dense_d() const;          // materialize D
  RealVector grading_diag() const; // interleaved +-1 grading (even triples)
  GradedOperator dirac_op() const;
  GradedOperator gamma_op() const;

  // smallest admissible cocycle degree of the requested parity: the least
  // n = degree_parity (mod 2) with n > summability_p - 1
  int degree_floor(bool odd_degree) const;

  void check_invariants(const Tolerances& tol = default_tolerances()) const;
};

// self-adjoint odd (or ungraded, for odd triples) bounded perturbation
struct GaugePotential {
  GradedOperator op;
  double norm_bound = 0.0;

  static GaugePotential make(GradedOperator op, const Tolerances& tol = default_tolerances());
};

// --- constructors ---

// circle: modes e^{i n theta}, |n| <= N, D = diag(n), p = 1+
SpectralTriple circle_triple(int mode_cutoff);

// flat 2-torus Dirac D = k1 s1 + k2 s2 on 2-spinors, gamma = s3, p = 2+;
// mass_shift adds m*s3 per fiber for gap diagnostics only
SpectralTriple torus2_dirac(int mode_cutoff, std::optional<double> mass_shift = std::nullopt);

// finite even triple on C^2: D = m s1, gamma = s3 (gapped two-point space)
SpectralTriple two_point_triple(double mass);

// degenerate even triple with H = C^+ only, D = 0
SpectralTriple trivial_plus_triple();

// H (x) C^N, D (x) 1, algebra M_N(A)
SpectralTriple matrix_amplify(const SpectralTriple& t, int n);

// odd triple of Eq-22 type: D' = -i d/dtheta (x) gamma + 1 (x) D on the
// circle (direction 0) times the even input triple
SpectralTriple product_with_circle(const SpectralTriple& even_triple, int circle_cutoff);

// D -> D + A, everything else unchanged
SpectralTriple perturb(const SpectralTriple& t, const GaugePotential& a,
                       const Tolerances& tol = default_tolerances());

// A^g = g^{-1} A g + g^{-1} [D, g]; D + A^g = g^{-1} (D + A) g
GaugePotential gauge_transform(const GradedOperator& d, const GaugePotential& a,
                               const GradedOperator& g,
                               const Tolerances& tol = default_tolerances());

// dense block-Toeplitz compression of a multiplication operator onto the
// triple's lattice; errors when the band exceeds the cutoff
Matrix compress_symbol(const FourierSymbol& symbol, const SpectralTriple& t);

// register a named algebra generator (band checked against the cutoff)
void add_algebra_generator(SpectralTriple& t, const std::string& name, const FourierSymbol& f);

}  // namespace ncindex
