#pragma once

namespace ncindex {

// Central numerical tolerance record. Every comparison in the library reads
// from an instance of this struct; the defaults below are the shipped values.
struct Tolerances {
  double hermiticity = 1e-10;       // ||M - M*||_max admissible for "Hermitian"
  double reconstruction = 1e-9;     // relative Frobenius defect of U L U* vs M
  double unitarity = 1e-9;          // ||U*U - 1||_max for "unitary"
  double kernel_rel = 1e-8;         // kernel threshold = kernel_rel * ||D||_op
  double idempotent = 1e-9;         // ||e^2 - e||_max for idempotents
  double parity = 1e-12;            // block-structure defect for graded operators
  double interior = 1e-10;          // interior-window algebraic identities
  double pairing_defect = 1e-3;     // integrality gate for well-resolved scenarios
  double quality_warn = 0.1;        // reports above this quality score are flagged
  double gap_ratio = 0.1;           // kernel-count reliability gate
  double symbol_tail = 1e-12;       // Fourier tail cut for smooth symbols
  double boundary_mass = 0.5;       // stable-interior rejection threshold
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace ncindex
