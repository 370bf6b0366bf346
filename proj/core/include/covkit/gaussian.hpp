#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "covkit/constants.hpp"
#include "covkit/errors.hpp"

namespace covkit {

struct ModeSpec {
  std::string label;
  double frequency = 0.0;  // Hz, > 0
};

// 2N x 2N real symmetric covariance matrix in the interleaved quadrature
// ordering (x1, p1, x2, p2, ...), vacuum variance 1 (x = a + a^dag).
// Construction validates dimensions and symmetrizes; unphysical matrices are
// representable on purpose — physicality_report is the arbiter of validity.
class CovarianceMatrix {
 public:
  CovarianceMatrix(std::vector<ModeSpec> modes, const Eigen::MatrixXd& entries);

  int n_modes() const { return static_cast<int>(modes_.size()); }
  const std::vector<ModeSpec>& modes() const { return modes_; }
  const Eigen::MatrixXd& mat() const { return v_; }

  // index of the mode with the given label; throws UnknownMode
  int index_of(const std::string& label) const;

 private:
  std::vector<ModeSpec> modes_;
  Eigen::MatrixXd v_;
};

struct SymplecticSpectrum {
  std::vector<double> values;    // N moduli, ascending
  double pairing_residual = 0.0; // worst +/- i*nu pairing defect
};

struct Bipartition {
  std::vector<std::string> side_a;
  std::vector<std::string> side_b;
};

struct PhysicalityReport {
  bool classical_ok = false;
  bool quantum_ok = false;
  double min_eigenvalue = 0.0;
  double min_symplectic_eigenvalue = 0.0;
};

// block-diagonal Omega with per-mode [[0,1],[-1,0]] blocks
Eigen::MatrixXd symplectic_form(int n_modes);

// moduli of the +/- i*nu eigenvalue pairs of Omega*V, ascending.
// Throws NotPositiveSemidefinite if min eig(V) < -tol::psd, PairingFailure if
// the spectrum of Omega*V is not pure-imaginary-paired within tol::pairing.
SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& V);

PhysicalityReport physicality_report(const CovarianceMatrix& V,
                                     double tol_psd = tol::psd,
                                     double tol_quantum = tol::quantum);

// P*V*P with P = -1 at the p quadrature of each flipped mode. Involution.
CovarianceMatrix partial_transpose(const CovarianceMatrix& V,
                                   const std::vector<std::string>& flipped);

// principal submatrix on the kept modes, metadata in requested order
CovarianceMatrix reduce_to_modes(const CovarianceMatrix& V,
                                 const std::vector<std::string>& keep);

// 1/sqrt(det V); throws UnphysicalState when det V < 1 - 1e-9
double purity(const CovarianceMatrix& V);

}  // namespace covkit
