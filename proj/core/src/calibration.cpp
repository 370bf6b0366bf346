#include "covkit/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "covkit/constants.hpp"

namespace covkit::cal {

namespace {

std::string quad_name(Quad q) { return q == Quad::I ? "I" : "Q"; }

std::string key_name(const MomentKey& k) {
  return k.mode_i + "." + quad_name(k.quad_i) + " x " + k.mode_j + "." +
         quad_name(k.quad_j);
}

bool key_matches(const MomentKey& a, const MomentKey& b) {
  const bool fwd = a.mode_i == b.mode_i && a.quad_i == b.quad_i &&
                   a.mode_j == b.mode_j && a.quad_j == b.quad_j;
  const bool rev = a.mode_i == b.mode_j && a.quad_i == b.quad_j &&
                   a.mode_j == b.mode_i && a.quad_j == b.quad_i;
  return fwd || rev;
}

void check_mode_index(const CalibrationConstants& c, int mode) {
  if (mode < 0 || mode >= static_cast<int>(c.per_mode.size())) {
    std::ostringstream os;
    os << "mode index " << mode << " out of range";
    fail(ErrorCode::IndexOutOfRange, os.str());
  }
}

void check_constants(const CalibrationConstants& c) {
  if (c.per_mode.empty()) fail(ErrorCode::DimensionMismatch, "no modes");
  if (!(c.z0 > 0.0) || !(c.bw > 0.0))
    fail(ErrorCode::NonPositiveInput, "Z0 and BW must be > 0");
  for (const auto& m : c.per_mode)
    if (!(m.gain > 0.0) || !(m.temperature > 0.0) || !(m.frequency > 0.0))
      fail(ErrorCode::NonPositiveInput,
           "gain, temperature and frequency must be > 0 for mode '" + m.label + "'");
}

// cross-moment prefactor; also used at i == j for the within-mode I-Q cross moment,
// where sqrt(G^2 f^2) = G f and the same no-subtraction argument applies
double cross_scale(double on, const CalibrationConstants& c, int i, int j) {
  const auto& mi = c.per_mode[static_cast<size_t>(i)];
  const auto& mj = c.per_mode[static_cast<size_t>(j)];
  const double denom = std::sqrt(mi.gain * mj.gain * mi.frequency * mj.frequency) *
                       c.z0 * phys::h * c.bw;
  return 4.0 * on / denom;
}

double coth_signed(double x) {
  if (std::abs(x) > 20.0) return x > 0.0 ? 1.0 : -1.0;
  return 1.0 / std::tanh(x);
}

}  // namespace

const MomentRow& RawMomentRecord::find(const MomentKey& k) const {
  for (const auto& row : rows)
    if (key_matches(row.key, k)) return row;
  fail(ErrorCode::MissingEntry, key_name(k));
}

double coth_thermal(double f, double T) {
  if (!(f > 0.0) || !(T > 0.0))
    fail(ErrorCode::NonPositiveInput, "coth_thermal needs f > 0 and T > 0");
  const double arg = phys::h * f / (2.0 * phys::k_B * T);
  if (arg > 20.0) return 1.0;
  return 1.0 / std::tanh(arg);
}

double scale_variance(double on, double off, const CalibrationConstants& c,
                      int mode) {
  check_constants(c);
  check_mode_index(c, mode);
  const auto& m = c.per_mode[static_cast<size_t>(mode)];
  return 4.0 * (on - off) / (m.gain * c.z0 * phys::h * m.frequency * c.bw) +
         coth_thermal(m.frequency, m.temperature);
}

double scale_covariance(double on, const CalibrationConstants& c, int mode_i,
                        int mode_j) {
  check_constants(c);
  check_mode_index(c, mode_i);
  check_mode_index(c, mode_j);
  if (mode_i == mode_j)
    fail(ErrorCode::SameMode, "same-mode variance goes through scale_variance");
  return cross_scale(on, c, mode_i, mode_j);
}

RawMomentRecord chop_difference(const std::vector<MomentFrame>& segments,
                                int n_cycles, double segment_seconds) {
  if (n_cycles < 1) fail(ErrorCode::SegmentCountMismatch, "need at least one cycle");
  if (segments.size() != 2 * static_cast<size_t>(n_cycles)) {
    std::ostringstream os;
    os << "expected " << 2 * n_cycles << " interleaved on/off segments, got "
       << segments.size();
    fail(ErrorCode::SegmentCountMismatch, os.str());
  }
  const auto& keys = segments.front().values;
  RawMomentRecord rec;
  rec.n_cycles = n_cycles;
  rec.segment_seconds = segment_seconds;
  rec.rows.reserve(keys.size());
  for (const auto& ref : keys) {
    double on = 0.0, off = 0.0;
    for (int cyc = 0; cyc < n_cycles; ++cyc) {
      const auto pick = [&](const MomentFrame& fr) -> double {
        for (const auto& v : fr.values)
          if (key_matches(v.key, ref.key)) return v.on;
        fail(ErrorCode::MissingEntry, key_name(ref.key) + " absent from a segment");
      };
      on += pick(segments[static_cast<size_t>(2 * cyc)]);
      off += pick(segments[static_cast<size_t>(2 * cyc + 1)]);
    }
    MomentRow row;
    row.key = ref.key;
    row.on = on / n_cycles;
    row.off = off / n_cycles;
    rec.rows.push_back(row);
  }
  return rec;
}

SntjFit sntj_fit(const SntjSweep& sweep, double f) {
  if (!(f > 0.0)) fail(ErrorCode::NonPositiveInput, "frequency must be > 0");
  const size_t n = sweep.bias_v.size();
  if (n != sweep.noise.size())
    fail(ErrorCode::ParseError, "bias and noise arrays differ in length");
  if (n < 7)
    fail(ErrorCode::InsufficientBiasRange, "need at least 7 bias points");
  const double vmin = *std::min_element(sweep.bias_v.begin(), sweep.bias_v.end());
  const double vmax = *std::max_element(sweep.bias_v.begin(), sweep.bias_v.end());
  if (!(vmin < 0.0 && vmax > 0.0))
    fail(ErrorCode::InsufficientBiasRange, "bias sweep must span both signs");
  const double hf = phys::h * f;
  if (phys::e * (-vmin) <= 3.0 * hf || phys::e * vmax <= 3.0 * hf)
    fail(ErrorCode::InsufficientBiasRange, "|eV| must exceed 3 hf at both extremes");

  // model N(V) = G Tsys + G q(V; T): linear in (G Tsys, G) at fixed T, so fit
  // T by golden-section on ln T with an exact 2x2 least-squares solve inside
  const auto quantum_term = [&](double T, std::vector<double>& q) {
    for (size_t k = 0; k < n; ++k) {
      const double ev = phys::e * sweep.bias_v[k];
      const double ap = (ev + hf) / (2.0 * phys::k_B * T);
      const double am = (ev - hf) / (2.0 * phys::k_B * T);
      q[k] = ((ev + hf) * coth_signed(ap) + (ev - hf) * coth_signed(am)) /
             (4.0 * phys::k_B);
    }
  };
  std::vector<double> q(n);
  struct Lin {
    double c0 = 0.0, c1 = 0.0, ssr = 0.0;
  };
  const auto solve_at = [&](double ln_t) {
    quantum_term(std::exp(ln_t), q);
    double s1 = static_cast<double>(n), sq = 0.0, sqq = 0.0, sy = 0.0, sqy = 0.0;
    for (size_t k = 0; k < n; ++k) {
      sq += q[k];
      sqq += q[k] * q[k];
      sy += sweep.noise[k];
      sqy += q[k] * sweep.noise[k];
    }
    Lin lin;
    const double det = s1 * sqq - sq * sq;
    lin.c0 = (sqq * sy - sq * sqy) / det;
    lin.c1 = (s1 * sqy - sq * sy) / det;
    for (size_t k = 0; k < n; ++k) {
      const double r = sweep.noise[k] - lin.c0 - lin.c1 * q[k];
      lin.ssr += r * r;
    }
    return lin;
  };

  double lo = std::log(1e-3), hi = std::log(1.0);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = solve_at(c).ssr, fd = solve_at(d).ssr;
  bool narrowed = false;
  for (int it = 0; it < 200; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = solve_at(c).ssr;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = solve_at(d).ssr;
    }
    if (hi - lo < 1e-12) {
      narrowed = true;
      break;
    }
  }
  if (!narrowed)
    fail(ErrorCode::FitNotConverged, "temperature bracket did not collapse");
  const double ln_t = 0.5 * (lo + hi);
  const Lin lin = solve_at(ln_t);
  if (!(lin.c1 > 0.0))
    fail(ErrorCode::FitNotConverged, "fitted gain is not positive");
  SntjFit out;
  out.gain = lin.c1;
  out.temperature = std::exp(ln_t);
  out.t_sys = lin.c0 / lin.c1;
  return out;
}

CovarianceMatrix assemble_covariance(const RawMomentRecord& rec,
                                     const CalibrationConstants& c) {
  check_constants(c);
  const int n = static_cast<int>(c.per_mode.size());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  std::vector<std::string> missing;
  const auto lookup = [&](const MomentKey& k) -> const MomentRow* {
    for (const auto& row : rec.rows)
      if (key_matches(row.key, k)) return &row;
    missing.push_back(key_name(k));
    return nullptr;
  };
  const std::array<Quad, 2> quads = {Quad::I, Quad::Q};
  for (int i = 0; i < n; ++i) {
    const auto& li = c.per_mode[static_cast<size_t>(i)].label;
    for (int qi = 0; qi < 2; ++qi) {
      // diagonal entries: difference formula plus thermal floor
      const MomentKey dk{li, quads[static_cast<size_t>(qi)], li, quads[static_cast<size_t>(qi)]};
      if (const auto* row = lookup(dk))
        v(2 * i + qi, 2 * i + qi) = scale_variance(row->on, row->off, c, i);
    }
    // within-mode I-Q cross moment, same prefactor at i = j
    const MomentKey ck{li, Quad::I, li, Quad::Q};
    if (const auto* row = lookup(ck)) {
      v(2 * i, 2 * i + 1) = cross_scale(row->on, c, i, i);
      v(2 * i + 1, 2 * i) = v(2 * i, 2 * i + 1);
    }
    for (int j = i + 1; j < n; ++j) {
      const auto& lj = c.per_mode[static_cast<size_t>(j)].label;
      for (int qi = 0; qi < 2; ++qi)
        for (int qj = 0; qj < 2; ++qj) {
          const MomentKey k{li, quads[static_cast<size_t>(qi)], lj, quads[static_cast<size_t>(qj)]};
          if (const auto* row = lookup(k)) {
            v(2 * i + qi, 2 * j + qj) = cross_scale(row->on, c, i, j);
            v(2 * j + qj, 2 * i + qi) = v(2 * i + qi, 2 * j + qj);
          }
        }
    }
  }
  if (!missing.empty()) {
    std::string what = "absent moment rows:";
    for (const auto& m : missing) what += " [" + m + "]";
    fail(ErrorCode::MissingEntry, what);
  }
  std::vector<ModeSpec> modes;
  for (const auto& m : c.per_mode) modes.push_back({m.label, m.frequency});
  return {std::move(modes), v};
}

}  // namespace covkit::cal
