#pragma once

#include <string>
#include <vector>

#include "ncindex/parallel.hpp"
#include "ncindex/triples.hpp"

namespace ncindex {

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowCrossing {
  double u_lo = 0.0;
  double u_hi = 0.0;
  int direction = 0;  // +1 negative -> positive
};

// Eigenvalue trace of the homotopy D_u = (1-u) D' + u g^{-1} D' g inside the
// tracked window. Snapshots keep only eigenvalues with |lambda| < window
// whose eigenvectors avoid the truncation boundary (spurious branches from
// modes the compressed conjugation kills are boundary-localized).
struct FlowTrace {
  std::vector<double> grid;                     // u values, ascending
  std::vector<std::vector<double>> spectra;     // tracked eigenvalues per u
  std::vector<FlowCrossing> crossings;
  long long net = 0;
  double min_abs_eigenvalue = 0.0;              // over all snapshots
  int eigensolve_count = 0;
  bool endpoint_zero_convention_used = false;   // plus-one bookkeeping engaged
  std::string note;
};

struct FlowOptions {
  double window = 0.75;
  int initial_steps = 16;
  int max_evals = 20000;
  int max_depth = 26;
  par::Exec exec = par::Exec::OpenMP;
};

// net number of eigenvalue zero crossings along the gauge homotopy;
// g must be unitary on the triple's space (compressed interior unitarity
// acceptable; quality is reflected in the trace note)
FlowTrace flow(const SpectralTriple& odd_triple, const Matrix& g, const FlowOptions& opts = {},
               const Tolerances& tol = default_tolerances());

// CSV rows (u, lambda_1 ... lambda_w) for the tracked window, crossing
// events appended; fixed column order, '.' decimal
std::string trace_to_csv(const FlowTrace& trace);

}  // namespace ncindex
