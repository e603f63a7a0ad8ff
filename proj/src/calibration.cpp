#include "ncindex/calibration.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

namespace ncindex {

double Calibration::lambda(int n) const {
  switch (n) {
    case 1: return lambda1;
    case 3: return lambda3;
    case 5: return lambda5;
    default: throw CalibrationError("lambda_n available for n = 1, 3, 5 only");
  }
}

double Calibration::mu(int n) const {
  switch (n) {
    case 0: return mu0;
    case 2: return mu2;
    case 4: return mu4;
    default: throw CalibrationError("mu_n available for n = 0, 2, 4 only");
  }
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string body_of(const Calibration& c) {
  std::ostringstream os;
  os << "lambda1 = " << fmt(c.lambda1) << "\n";
  os << "lambda3 = " << fmt(c.lambda3) << "\n";
  os << "lambda5 = " << fmt(c.lambda5) << "\n";
  os << "mu0 = " << fmt(c.mu0) << "\n";
  os << "mu2 = " << fmt(c.mu2) << "\n";
  os << "mu4 = " << fmt(c.mu4) << "\n";
  os << "sign_quadrature = " << c.sign_quadrature << "\n";
  os << "sign_toeplitz = " << c.sign_toeplitz << "\n";
  os << "sign_flow = " << c.sign_flow << "\n";
  os << "sign_kernel = " << c.sign_kernel << "\n";
  os << "sign_berry = " << c.sign_berry << "\n";
  return os.str();
}

}  // namespace

std::string Calibration::checksum() const { return fnv1a_hex(body_of(*this)); }

std::string Calibration::serialize() const {
  std::string body = body_of(*this);
  return "# ncindex calibration table\n" + body + "checksum = " + fnv1a_hex(body) + "\n";
}

Calibration Calibration::parse(const std::string& text) {
  Calibration c;
  std::string checksum_seen;
  std::istringstream is(text);
  std::string line;
  std::ostringstream body;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CalibrationError("calibration table: malformed line: " + line);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.pop_back();
    };
    trim(key);
    trim(val);
    if (key == "checksum") {
      checksum_seen = val;
      continue;
    }
    body << key << " = " << val << "\n";
    if (key == "lambda1") c.lambda1 = std::stod(val);
    else if (key == "lambda3") c.lambda3 = std::stod(val);
    else if (key == "lambda5") c.lambda5 = std::stod(val);
    else if (key == "mu0") c.mu0 = std::stod(val);
    else if (key == "mu2") c.mu2 = std::stod(val);
    else if (key == "mu4") c.mu4 = std::stod(val);
    else if (key == "sign_quadrature") c.sign_quadrature = std::stoi(val);
    else if (key == "sign_toeplitz") c.sign_toeplitz = std::stoi(val);
    else if (key == "sign_flow") c.sign_flow = std::stoi(val);
    else if (key == "sign_kernel") c.sign_kernel = std::stoi(val);
    else if (key == "sign_berry") c.sign_berry = std::stoi(val);
    else throw CalibrationError("calibration table: unknown key: " + key);
  }
  if (checksum_seen.empty()) throw CalibrationError("calibration table: missing checksum");
  if (fnv1a_hex(body.str()) != checksum_seen)
    throw CalibrationError("calibration table: checksum mismatch (tampered or corrupt)");
  return c;
}

const Calibration& Calibration::defaults() {
  static const Calibration c{};
  return c;
}

}  // namespace ncindex
