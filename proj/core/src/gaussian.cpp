#include "covkit/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace covkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AsymmetryTooLarge: return "AsymmetryTooLarge";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::PairingFailure: return "PairingFailure";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::EmptyOrFullSet: return "EmptyOrFullSet";
    case ErrorCode::UnphysicalState: return "UnphysicalState";
    case ErrorCode::WrongModeCount: return "WrongModeCount";
    case ErrorCode::InvalidBipartition: return "InvalidBipartition";
    case ErrorCode::OptimizerDiverged: return "OptimizerDiverged";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SymplecticityLost: return "SymplecticityLost";
    case ErrorCode::UnstableSystem: return "UnstableSystem";
    case ErrorCode::DegenerateResonance: return "DegenerateResonance";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::SameMode: return "SameMode";
    case ErrorCode::SegmentCountMismatch: return "SegmentCountMismatch";
    case ErrorCode::FitNotConverged: return "FitNotConverged";
    case ErrorCode::InsufficientBiasRange: return "InsufficientBiasRange";
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

CovarianceMatrix::CovarianceMatrix(std::vector<ModeSpec> modes,
                                   const Eigen::MatrixXd& entries)
    : modes_(std::move(modes)) {
  const auto n = static_cast<Eigen::Index>(modes_.size());
  if (n == 0) fail(ErrorCode::NonPositiveInput, "state needs at least one mode");
  std::set<std::string> labels;
  for (const auto& m : modes_) {
    if (!(m.frequency > 0.0))
      fail(ErrorCode::NonPositiveInput, "mode '" + m.label + "' frequency must be > 0");
    if (!labels.insert(m.label).second)
      fail(ErrorCode::ParseError, "duplicate mode label '" + m.label + "'");
  }
  if (entries.rows() != entries.cols() || entries.rows() != 2 * n) {
    std::ostringstream os;
    os << "expected " << 2 * n << "x" << 2 * n << " matrix, got " << entries.rows()
       << "x" << entries.cols();
    fail(ErrorCode::DimensionMismatch, os.str());
  }
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol::sym_input) {
    std::ostringstream os;
    os << "max asymmetry " << asym << " exceeds " << tol::sym_input;
    fail(ErrorCode::AsymmetryTooLarge, os.str());
  }
  v_ = 0.5 * (entries + entries.transpose());
}

int CovarianceMatrix::index_of(const std::string& label) const {
  for (int k = 0; k < n_modes(); ++k)
    if (modes_[static_cast<size_t>(k)].label == label) return k;
  fail(ErrorCode::UnknownMode, "no mode labeled '" + label + "'");
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) fail(ErrorCode::DimensionMismatch, "n_modes must be >= 1");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

namespace {

// moduli of the eigenvalues of Omega*V paired by sorted imaginary part;
// residual covers both stray real parts and pair mismatch
std::pair<std::vector<double>, double> spectrum_unchecked(const Eigen::MatrixXd& v) {
  const int n = static_cast<int>(v.rows()) / 2;
  Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(n) * v, false);
  const auto& ev = es.eigenvalues();
  double re_max = 0.0;
  std::vector<double> mods(static_cast<size_t>(2 * n));
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    re_max = std::max(re_max, std::abs(ev[k].real()));
    mods[static_cast<size_t>(k)] = std::abs(ev[k].imag());
  }
  std::sort(mods.begin(), mods.end());
  std::vector<double> values(static_cast<size_t>(n));
  double pair_diff = 0.0;
  for (int k = 0; k < n; ++k) {
    const double lo = mods[static_cast<size_t>(2 * k)];
    const double hi = mods[static_cast<size_t>(2 * k + 1)];
    values[static_cast<size_t>(k)] = 0.5 * (lo + hi);
    pair_diff = std::max(pair_diff, hi - lo);
  }
  return {std::move(values), std::max(re_max, pair_diff)};
}

double min_eigenvalue(const Eigen::MatrixXd& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& V) {
  const double min_eig = min_eigenvalue(V.mat());
  if (min_eig < -tol::psd) {
    std::ostringstream os;
    os << "min eigenvalue " << min_eig << " < " << -tol::psd
       << "; run physicality_report first";
    fail(ErrorCode::NotPositiveSemidefinite, os.str());
  }
  auto [values, residual] = spectrum_unchecked(V.mat());
  if (residual > tol::pairing) {
    std::ostringstream os;
    os << "eigenvalues of Omega*V not paired as +/- i*nu (residual " << residual << ")";
    fail(ErrorCode::PairingFailure, os.str());
  }
  return {std::move(values), residual};
}

PhysicalityReport physicality_report(const CovarianceMatrix& V, double tol_psd,
                                     double tol_quantum) {
  PhysicalityReport rep;
  rep.min_eigenvalue = min_eigenvalue(V.mat());
  rep.classical_ok = rep.min_eigenvalue >= -tol_psd;
  auto [values, residual] = spectrum_unchecked(V.mat());
  if (residual <= tol::pairing) {
    rep.min_symplectic_eigenvalue = values.front();
    rep.quantum_ok = rep.classical_ok && rep.min_symplectic_eigenvalue >= 1.0 - tol_quantum;
  } else {
    // indefinite input: pairing broke down, no meaningful nu
    rep.min_symplectic_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    rep.quantum_ok = false;
  }
  return rep;
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& V,
                                   const std::vector<std::string>& flipped) {
  if (flipped.empty())
    fail(ErrorCode::EmptyOrFullSet, "nothing to transpose");
  std::set<int> idx;
  for (const auto& label : flipped) idx.insert(V.index_of(label));
  if (static_cast<int>(idx.size()) == V.n_modes())
    fail(ErrorCode::EmptyOrFullSet, "transposing every mode is global time reversal");
  const auto dim = V.mat().rows();
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(dim);
  for (int m : idx) sign(2 * m + 1) = -1.0;
  Eigen::MatrixXd out = sign.asDiagonal() * V.mat() * sign.asDiagonal();
  return {V.modes(), out};
}

CovarianceMatrix reduce_to_modes(const CovarianceMatrix& V,
                                 const std::vector<std::string>& keep) {
  if (keep.empty()) fail(ErrorCode::NonPositiveInput, "keep list is empty");
  std::vector<int> sel;
  std::set<int> seen;
  std::vector<ModeSpec> modes;
  for (const auto& label : keep) {
    const int m = V.index_of(label);
    if (!seen.insert(m).second)
      fail(ErrorCode::ParseError, "duplicate label '" + label + "' in keep list");
    sel.push_back(m);
    modes.push_back(V.modes()[static_cast<size_t>(m)]);
  }
  const auto k = static_cast<Eigen::Index>(sel.size());
  Eigen::MatrixXd sub(2 * k, 2 * k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      for (int qa = 0; qa < 2; ++qa)
        for (int qb = 0; qb < 2; ++qb)
          sub(2 * a + qa, 2 * b + qb) =
              V.mat()(2 * sel[static_cast<size_t>(a)] + qa,
                      2 * sel[static_cast<size_t>(b)] + qb);
  return {std::move(modes), sub};
}

double purity(const CovarianceMatrix& V) {
  const auto rep = physicality_report(V);
  const double det = V.mat().determinant();
  if (!rep.quantum_ok || det < 1.0 - 1e-9) {
    std::ostringstream os;
    os << "det V = " << det << ", min nu = " << rep.min_symplectic_eigenvalue
       << "; purity defined only for physical states";
    fail(ErrorCode::UnphysicalState, os.str());
  }
  return std::min(1.0, 1.0 / std::sqrt(det));
}

}  // namespace covkit
