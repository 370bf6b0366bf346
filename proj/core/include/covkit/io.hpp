#pragma once

#include <string>
#include <utility>
#include <vector>

#include "covkit/calibration.hpp"
#include "covkit/entanglement.hpp"
#include "covkit/gaussian.hpp"

namespace covkit::io {

// ordered string fields; emitted verbatim so output stays byte-reproducible
using KvList = std::vector<std::pair<std::string, std::string>>;

struct RawMomentSeries {
  std::vector<cal::MomentFrame> segments;  // interleaved ON,OFF,...
  int n_cycles = 1;
  double segment_seconds = 0.0;
};

struct ReportManifest {
  std::string command;
  std::vector<std::string> inputs;
  KvList config;  // tolerances / optimizer settings, preformatted
};

// covariance document: modes, ordering ("xp-interleaved"), vacuum_variance
// (must be 1), matrix; optional provenance block
CovarianceMatrix read_covariance(const std::string& path);
void write_covariance(const std::string& path, const CovarianceMatrix& V,
                      const KvList* provenance = nullptr);

std::string report_to_string(const ent::EntanglementReport& r,
                             const ReportManifest& m);
void write_report(const std::string& path, const ent::EntanglementReport& r,
                  const ReportManifest& m);

RawMomentSeries read_raw_moments(const std::string& path);
cal::SntjSweep read_sntj(const std::string& path);

cal::CalibrationConstants read_constants(const std::string& path);
void write_constants(const std::string& path,
                     const cal::CalibrationConstants& c);

// %.17g, the fixed numeric formatting used in every emitted document
std::string format_double(double x);

}  // namespace covkit::io
