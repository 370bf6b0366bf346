#pragma once

#include <vector>

#include "covkit/gaussian.hpp"

namespace covkit::sim {

struct PumpTone {
  double frequency = 0.0;  // Hz
  double coupling = 0.0;   // rad/s, effective g or g' (absorbs g0 |alpha_p|)
  double phase = 0.0;      // rad
};

enum class TermKind { down_conversion, coherent_coupling };

struct RwaTerm {
  TermKind kind = TermKind::down_conversion;
  int i = 0, j = 0;        // mode indices, i < j
  double strength = 0.0;   // rad/s
  double phase = 0.0;
};

// H = (hbar/4) K^T h K in the interleaved quadrature basis
struct QuadraticGenerator {
  Eigen::MatrixXd h;
  std::vector<RwaTerm> terms;
};

struct CavityConfig {
  std::vector<ModeSpec> modes;
  std::vector<double> kappa;  // rad/s, per mode
  double rwa_tol = 1e6;       // Hz
};

struct SteadyState {
  CovarianceMatrix output;       // propagating output field at zero detuning
  CovarianceMatrix intracavity;  // Lyapunov solution
  double lyapunov_residual = 0.0;  // of the kappa_max-normalized system
};

enum class Scheme { cm, bs };

struct Preset {
  CavityConfig config;
  QuadraticGenerator gen;
  std::vector<PumpTone> pumps;
};

// pairs matched as f_pump = f_i + f_j (down conversion) or |f_i - f_j|
// (coherent coupling) within tol. A 2 f_i match throws DegenerateResonance;
// no match returns an empty list.
std::vector<RwaTerm> select_rwa_terms(const std::vector<ModeSpec>& modes,
                                      const PumpTone& pump, double tol_hz);

QuadraticGenerator build_generator(const std::vector<ModeSpec>& modes,
                                   const std::vector<RwaTerm>& terms);

// V -> S V S^T with S = exp(Omega h t), symplecticity checked
CovarianceMatrix unitary_propagate(const CovarianceMatrix& V_in,
                                   const QuadraticGenerator& gen, double t);

// zero-detuning input-output steady state, vacuum input, single overcoupled
// port per mode; throws UnstableSystem above the oscillation threshold
SteadyState steady_state_output(const CavityConfig& cfg,
                                const QuadraticGenerator& gen);

// reference geometry: modes 4.20/6.16/7.55 GHz, Q = 7000, CM pumps 10.36 + 3.35
// GHz, BS pumps 10.36 + 11.75 GHz; g1 drives the first pump, g2 the second
Preset scheme_preset(Scheme name, double g1, double g2);

// largest s with the drift of scheme_preset(name, s, s) still Hurwitz
double equal_coupling_threshold(Scheme name);

// largest real part of the drift eigenvalues (stability diagnostic)
double stability_margin(const CavityConfig& cfg, const QuadraticGenerator& gen);

}  // namespace covkit::sim
