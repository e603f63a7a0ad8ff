#pragma once

#include <map>
#include <string>

#include "ncindex/cocycles.hpp"
#include "ncindex/ktheory.hpp"

namespace ncindex {

class PairingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportStatus { Ok, Warning };

// Integer pairing report: per-degree contributions (the lowest admissible
// degree carries the base value, higher degrees the increment of the
// renormalized estimate over the previous degree, so the contributions sum
// to the highest-degree estimate), the total, its nearest integer and the
// truncation quality score.
struct PairingReport {
  std::map<int, cx> per_degree;
  cx total = 0.0;
  long long nearest_integer = 0;
  double defect = 0.0;        // |total - nearest_integer|
  double quality = 0.0;       // measured compression leakage (0 = interior-exact)
  ReportStatus status = ReportStatus::Ok;
  std::string cutoff_note;    // truncation metadata (cutoffs, bands, tails)

  void finalize();            // recompute integer/defect/status from total
};

struct PairingOptions {
  double tail_tol = 1e-12;      // working Fourier tail for smooth symbols
  par::Exec exec = par::Exec::OpenMP;
  Calibration calibration = Calibration::defaults();
  bool force_dense = false;     // use the dense reference path regardless of size
};

// odd anomaly pairing sum_k (-1)^k k! phi_{2k+1}(g^{-1}, g, ..., g^{-1}, g)
// over the admissible odd degrees up to max_degree
PairingReport odd_pairing(const SpectralTriple& odd_triple, const UnitaryLoop& loop,
                          int max_degree, const PairingOptions& opts = {},
                          const Tolerances& tol = default_tolerances());
PairingReport odd_pairing(const SpectralTriple& odd_triple, const SymbolPair& loop_pair,
                          int max_degree, const PairingOptions& opts = {},
                          const Tolerances& tol = default_tolerances());

// even index pairing of an idempotent with the triple's Chern character;
// nearest_integer is the Fredholm index of e D+ e
PairingReport even_pairing(const SpectralTriple& even_triple, const Idempotent& e,
                           int max_degree, const PairingOptions& opts = {},
                           const Tolerances& tol = default_tolerances());

// Eq-21/22 pipeline: product with the circle, embed the loop, delegate to
// the odd pairing (the triple is amplified to the loop's matrix size)
PairingReport anomaly_integral(const SpectralTriple& base_even_triple, const SuspendedLoop& loop,
                               int circle_cutoff, int max_degree, const PairingOptions& opts = {},
                               const Tolerances& tol = default_tolerances());

// single-degree renormalized estimates (what the report telescopes);
// exposed for degree-stability diagnostics and tests
std::map<int, cx> odd_degree_estimates(const SpectralTriple& odd_triple, const SymbolPair& pair,
                                       int max_degree, const PairingOptions& opts = {},
                                       const Tolerances& tol = default_tolerances());

}  // namespace ncindex
