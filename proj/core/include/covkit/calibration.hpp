#pragma once

#include <string>
#include <vector>

#include "covkit/gaussian.hpp"

namespace covkit::cal {

struct CalibrationConstants {
  struct PerMode {
    std::string label;
    double frequency = 0.0;    // Hz
    double gain = 0.0;         // dimensionless power gain
    double temperature = 0.0;  // K
  };
  std::vector<PerMode> per_mode;
  double z0 = 50.0;  // ohm
  double bw = 1e6;   // Hz
};

enum class Quad { I, Q };  // I -> x, Q -> p

struct MomentKey {
  std::string mode_i;
  Quad quad_i = Quad::I;
  std::string mode_j;
  Quad quad_j = Quad::I;
};

struct MomentRow {
  MomentKey key;
  double on = 0.0;   // V^2
  double off = 0.0;  // V^2
};

struct RawMomentRecord {
  std::vector<MomentRow> rows;
  int n_cycles = 1;
  double segment_seconds = 0.0;

  // unordered key lookup ((i,qi,j,qj) matches (j,qj,i,qi)); throws MissingEntry
  const MomentRow& find(const MomentKey& k) const;
};

// one acquisition segment worth of second moments
struct MomentFrame {
  std::vector<MomentRow> values;  // .off unused, .on holds the segment moment
};

struct SntjSweep {
  std::string label;           // mode this sweep calibrates
  double frequency = 0.0;      // Hz
  std::vector<double> bias_v;  // junction bias, V
  std::vector<double> noise;   // measured noise, linear units
};

struct SntjFit {
  double gain = 0.0;
  double temperature = 0.0;  // electron temperature, K
  double t_sys = 0.0;        // system noise temperature, K
};

// coth(h f / 2 k_B T), exactly 1.0 once the argument exceeds 20
double coth_thermal(double f, double T);

// diagonal moments: <x_i^2> = 4 (on - off) / (G_i Z0 h f_i BW) + coth(h f_i / 2 k_B T_i)
double scale_variance(double on, double off, const CalibrationConstants& c,
                      int mode);

// cross moments: <x_i x_j> = 4 on / (sqrt(G_i G_j f_i f_j) Z0 h BW); i != j
double scale_covariance(double on, const CalibrationConstants& c, int mode_i,
                        int mode_j);

// averages interleaved ON,OFF,ON,OFF,... segment moments over cycles
RawMomentRecord chop_difference(const std::vector<MomentFrame>& segments,
                                int n_cycles, double segment_seconds);

// variable-projection least squares against the standard shot-noise curve
SntjFit sntj_fit(const SntjSweep& sweep, double f);

// difference formula on the diagonal, gain rescale elsewhere; all 21 independent entries required
CovarianceMatrix assemble_covariance(const RawMomentRecord& rec,
                                     const CalibrationConstants& c);

}  // namespace covkit::cal
