#include "covkit/parametric.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace covkit::sim {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_modes(const std::vector<ModeSpec>& modes) {
  if (modes.empty()) fail(ErrorCode::DimensionMismatch, "no modes");
  std::set<double> freqs;
  for (const auto& m : modes) {
    if (!(m.frequency > 0.0))
      fail(ErrorCode::NonPositiveInput, "mode frequency must be > 0");
    if (!freqs.insert(m.frequency).second)
      fail(ErrorCode::ParseError, "mode frequencies must be distinct");
  }
}

Eigen::MatrixXd drift(const CavityConfig& cfg, const Eigen::MatrixXd& h) {
  const auto n = static_cast<Eigen::Index>(cfg.modes.size());
  Eigen::MatrixXd a = symplectic_form(static_cast<int>(n)) * h;
  for (Eigen::Index m = 0; m < n; ++m) {
    a(2 * m, 2 * m) -= 0.5 * cfg.kappa[static_cast<size_t>(m)];
    a(2 * m + 1, 2 * m + 1) -= 0.5 * cfg.kappa[static_cast<size_t>(m)];
  }
  return a;
}

double max_real_eig(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

void check_cfg(const CavityConfig& cfg, const QuadraticGenerator& gen) {
  check_modes(cfg.modes);
  if (cfg.kappa.size() != cfg.modes.size())
    fail(ErrorCode::DimensionMismatch, "kappa list does not match mode count");
  for (double k : cfg.kappa)
    if (!(k > 0.0)) fail(ErrorCode::NonPositiveInput, "kappa must be > 0");
  if (gen.h.rows() != 2 * static_cast<Eigen::Index>(cfg.modes.size()))
    fail(ErrorCode::DimensionMismatch, "generator dimension does not match modes");
}

// Lyapunov solve A V + V A^T + D = 0 via the 4n^2 Kronecker system, on the
// kappa_max-normalized drift so the residual is meaningful in doubles
std::pair<Eigen::MatrixXd, double> lyapunov(const Eigen::MatrixXd& a,
                                            const Eigen::VectorXd& d_diag,
                                            double scale) {
  const auto n = a.rows();
  const Eigen::MatrixXd an = a / scale;
  const Eigen::VectorXd dn = d_diag / scale;
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * n, n * n);
  // vec(A V) = (I (x) A) vec(V), vec(V A^T) = (A (x) I) vec(V), column-major
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index k = 0; k < n; ++k) {
        big(c * n + r, c * n + k) += an(r, k);
        big(c * n + r, k * n + r) += an(c, k);
      }
    }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
  for (Eigen::Index k = 0; k < n; ++k) rhs(k * n + k) = -dn(k);
  const Eigen::VectorXd sol = big.partialPivLu().solve(rhs);
  Eigen::MatrixXd v(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) v(r, c) = sol(c * n + r);
  v = 0.5 * (v + v.transpose()).eval();
  Eigen::MatrixXd resid = an * v + v * an.transpose();
  resid.diagonal() += dn;
  return {v, resid.cwiseAbs().maxCoeff()};
}

const std::vector<ModeSpec>& reference_modes() {
  static const std::vector<ModeSpec> modes = {
      {"m1", 4.20e9}, {"m2", 6.16e9}, {"m3", 7.55e9}};
  return modes;
}

}  // namespace

std::vector<RwaTerm> select_rwa_terms(const std::vector<ModeSpec>& modes,
                                      const PumpTone& pump, double tol_hz) {
  check_modes(modes);
  if (!(tol_hz > 0.0)) fail(ErrorCode::NonPositiveInput, "tolerance must be > 0");
  if (!(pump.frequency > 0.0))
    fail(ErrorCode::NonPositiveInput, "pump frequency must be > 0");
  const int n = static_cast<int>(modes.size());
  for (int i = 0; i < n; ++i) {
    if (std::abs(pump.frequency - 2.0 * modes[static_cast<size_t>(i)].frequency) <= tol_hz) {
      std::ostringstream os;
      os << "pump at " << pump.frequency << " Hz matches 2 f_" << i + 1
         << " (degenerate squeezing not modeled)";
      fail(ErrorCode::DegenerateResonance, os.str());
    }
  }
  std::vector<RwaTerm> terms;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double fi = modes[static_cast<size_t>(i)].frequency;
      const double fj = modes[static_cast<size_t>(j)].frequency;
      if (std::abs(pump.frequency - (fi + fj)) <= tol_hz)
        terms.push_back({TermKind::down_conversion, i, j, pump.coupling, pump.phase});
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double fi = modes[static_cast<size_t>(i)].frequency;
      const double fj = modes[static_cast<size_t>(j)].frequency;
      if (std::abs(pump.frequency - std::abs(fi - fj)) <= tol_hz)
        terms.push_back({TermKind::coherent_coupling, i, j, pump.coupling, pump.phase});
    }
  return terms;
}

QuadraticGenerator build_generator(const std::vector<ModeSpec>& modes,
                                   const std::vector<RwaTerm>& terms) {
  check_modes(modes);
  const auto n = static_cast<Eigen::Index>(modes.size());
  QuadraticGenerator gen;
  gen.h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  gen.terms = terms;
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n) {
      std::ostringstream os;
      os << "term indices (" << t.i << "," << t.j << ") out of range for " << n
         << " modes";
      fail(ErrorCode::IndexOutOfRange, os.str());
    }
    if (t.i == t.j)
      fail(ErrorCode::IndexOutOfRange, "term must couple two distinct modes");
    const Eigen::Index xi = 2 * t.i, pi = 2 * t.i + 1;
    const Eigen::Index xj = 2 * t.j, pj = 2 * t.j + 1;
    const double c = t.strength * std::cos(t.phase);
    const double s = t.strength * std::sin(t.phase);
    if (t.kind == TermKind::down_conversion) {
      // H_DC = hbar g (a_i a_j e^{i phase} + h.c.)
      gen.h(xi, pj) += c;
      gen.h(pj, xi) += c;
      gen.h(pi, xj) += c;
      gen.h(xj, pi) += c;
      gen.h(xi, xj) += s;
      gen.h(xj, xi) += s;
      gen.h(pi, pj) -= s;
      gen.h(pj, pi) -= s;
    } else {
      // H_CC = hbar g' (a_i a_j^dag e^{i phase} + h.c.)
      gen.h(xi, xj) += c;
      gen.h(xj, xi) += c;
      gen.h(pi, pj) += c;
      gen.h(pj, pi) += c;
      gen.h(xi, pj) += s;
      gen.h(pj, xi) += s;
      gen.h(pi, xj) -= s;
      gen.h(xj, pi) -= s;
    }
  }
  return gen;
}

CovarianceMatrix unitary_propagate(const CovarianceMatrix& V_in,
                                   const QuadraticGenerator& gen, double t) {
  if (gen.h.rows() != V_in.mat().rows())
    fail(ErrorCode::DimensionMismatch, "generator dimension does not match state");
  if (t < 0.0) fail(ErrorCode::NonPositiveInput, "propagation time must be >= 0");
  const int n = V_in.n_modes();
  const Eigen::MatrixXd omega = symplectic_form(n);
  const Eigen::MatrixXd s = (omega * gen.h * t).exp();
  const double defect = (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
  if (defect > 1e-9) {
    std::ostringstream os;
    os << "S Omega S^T defect " << defect << " > 1e-9; subdivide the step";
    fail(ErrorCode::SymplecticityLost, os.str());
  }
  return {V_in.modes(), s * V_in.mat() * s.transpose()};
}

SteadyState steady_state_output(const CavityConfig& cfg,
                                const QuadraticGenerator& gen) {
  check_cfg(cfg, gen);
  const auto n = static_cast<Eigen::Index>(cfg.modes.size());
  const Eigen::MatrixXd a = drift(cfg, gen.h);
  const double margin = max_real_eig(a);
  if (margin >= 0.0) {
    std::ostringstream os;
    os << "drift not Hurwitz: largest Re(eigenvalue) = " << margin
       << " rad/s (pump above the parametric oscillation threshold)";
    fail(ErrorCode::UnstableSystem, os.str());
  }
  Eigen::VectorXd kq(2 * n), dq(2 * n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double kap = cfg.kappa[static_cast<size_t>(m)];
    kq(2 * m) = std::sqrt(kap);
    kq(2 * m + 1) = std::sqrt(kap);
    dq(2 * m) = kap;
    dq(2 * m + 1) = kap;
  }
  // T = K (-A)^{-1} K - I, zero detuning, vacuum input
  const Eigen::MatrixXd neg_a = -a;
  Eigen::MatrixXd tmat = kq.asDiagonal() * neg_a.partialPivLu().solve(
                                               Eigen::MatrixXd(kq.asDiagonal()));
  tmat -= Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const Eigen::MatrixXd v_out = tmat * tmat.transpose();

  const double scale = *std::max_element(cfg.kappa.begin(), cfg.kappa.end());
  auto [v_cav, resid] = lyapunov(a, dq, scale);

  return {CovarianceMatrix(cfg.modes, v_out), CovarianceMatrix(cfg.modes, v_cav),
          resid};
}

Preset scheme_preset(Scheme name, double g1, double g2) {
  if (g1 < 0.0 || g2 < 0.0) fail(ErrorCode::NonPositiveInput, "couplings must be >= 0");
  Preset p;
  p.config.modes = reference_modes();
  p.config.rwa_tol = 1e6;
  for (const auto& m : p.config.modes)
    p.config.kappa.push_back(two_pi * m.frequency / 7000.0);
  if (name == Scheme::cm) {
    // sum-frequency pump f1+f2 plus difference pump f3-f1; the pi/2 coherent-
    // coupling phase makes the mode exchange real, which is what lines up the
    // output correlations in the x-x / p-p blocks
    p.pumps = {{10.36e9, g1, 0.0}, {3.35e9, g2, std::numbers::pi / 2.0}};
  } else {
    p.pumps = {{10.36e9, g1, 0.0}, {11.75e9, g2, 0.0}};
  }
  std::vector<RwaTerm> terms;
  for (const auto& pump : p.pumps) {
    auto t = select_rwa_terms(p.config.modes, pump, p.config.rwa_tol);
    terms.insert(terms.end(), t.begin(), t.end());
  }
  p.gen = build_generator(p.config.modes, terms);
  return p;
}

double stability_margin(const CavityConfig& cfg, const QuadraticGenerator& gen) {
  check_cfg(cfg, gen);
  return max_real_eig(drift(cfg, gen.h));
}

double equal_coupling_threshold(Scheme name) {
  const auto margin_at = [&](double s) {
    const Preset p = scheme_preset(name, s, s);
    return max_real_eig(drift(p.config, p.gen.h));
  };
  // march up to the first unstable point, then bisect
  const double smax = 4e7;
  const int steps = 500;
  double lo = 0.0, hi = -1.0;
  for (int k = 1; k <= steps; ++k) {
    const double s = smax * k / steps;
    if (margin_at(s) >= 0.0) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi < 0.0) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (margin_at(mid) >= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace covkit::sim
