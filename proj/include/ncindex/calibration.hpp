#pragma once

#include <cstdint>
#include <string>

#include <stdexcept>

namespace ncindex {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Frozen normalization constants and orientation signs. The shipped values
// are reproduced by the `calibrate` run from the oracles; candidate closed
// forms: lambda_{2j+1} = (-1)^j (2j+1)! / (j! 4^{j+1}), mu_{2m} = (-1)^m.
struct Calibration {
  // odd cocycle normalization lambda_n, n = 1, 3, 5
  double lambda1 = 0.25;
  double lambda3 = -0.375;
  double lambda5 = 0.9375;
  // even per-degree pairing factors mu_n, n = 0, 2, 4
  double mu0 = 1.0;
  double mu2 = -1.0;
  double mu4 = 1.0;
  // orientation signs relative to the pairing integer:
  //   pairing = sign_* x oracle
  int sign_quadrature = 1;
  int sign_toeplitz = -1;
  int sign_flow = 1;
  int sign_kernel = 1;
  int sign_berry = -1;

  double lambda(int n) const;  // n odd <= 5
  double mu(int n) const;      // n even <= 4

  std::string serialize() const;           // canonical text table
  static Calibration parse(const std::string& text);  // verifies the checksum line
  std::string checksum() const;            // FNV-1a over the canonical body

  static const Calibration& defaults();
};

}  // namespace ncindex
