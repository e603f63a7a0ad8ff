#pragma once

#include <string>

#include "ncindex/ktheory.hpp"
#include "ncindex/parallel.hpp"
#include "ncindex/triples.hpp"

namespace ncindex {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  long long value = 0;   // nearest integer
  double raw = 0.0;      // pre-rounding value
  std::string method;
  double defect = 0.0;   // |raw - value|, < 0.5 by construction

  static OracleResult from_raw(double raw, std::string method);
};

// (1/2 pi i) * trapezoid quadrature of tr(g^{-1} dg/dtheta) over the sample
// grid, the derivative taken spectrally from the Fourier data
OracleResult winding_quadrature(const UnitaryLoop& loop, par::Exec exec = par::default_exec());

// dim ker - dim coker of the Hardy-window compression of g, restricted to
// the stable interior: SVD null vectors concentrated in the top boundary
// strip are truncation artifacts and are discarded
OracleResult toeplitz_index(const UnitaryLoop& loop, int cutoff,
                            const Tolerances& tol = default_tolerances());

// dim ker(e D+ e) - dim ker(e D- e) within the ranges of the compressed
// idempotent, with boundary filtering and gap diagnostics
OracleResult kernel_index(const SpectralTriple& even_triple, const Idempotent& e,
                          const Tolerances& tol = default_tolerances());

// plaquette Berry-curvature Chern number of a fixed-rank projector field on
// a 2-torus grid (counterclockwise orientation); errors on vanishing
// overlaps (gap closure on the grid)
OracleResult berry_chern(const Idempotent& projector, par::Exec exec = par::default_exec());

namespace ref {
// serial reference implementations kept for testing the parallel kernels
OracleResult winding_quadrature(const UnitaryLoop& loop);
OracleResult berry_chern(const Idempotent& projector);
}  // namespace ref

}  // namespace ncindex
