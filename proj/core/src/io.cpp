#include "covkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "covkit/version.hpp"
#include "json.hpp"

namespace covkit::io {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, path + ": cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::ParseError, path + ": cannot open for writing");
  out << text;
  if (!out) fail(ErrorCode::ParseError, path + ": write failed");
}

json parse_json(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

const json& need(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end())
    fail(ErrorCode::ParseError, path + ": missing field '" + key + "'");
  return *it;
}

double need_number(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number())
    fail(ErrorCode::ParseError, path + ": field '" + key + "' is not a number");
  return v.get<double>();
}

std::string need_string(const json& j, const char* key,
                        const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string())
    fail(ErrorCode::ParseError, path + ": field '" + key + "' is not a string");
  return v.get<std::string>();
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string quoted(const std::string& s) { return "\"" + escape(s) + "\""; }

const char* bstr(bool b) { return b ? "true" : "false"; }

std::string mode_array(const std::vector<ModeSpec>& modes,
                       const std::string& indent) {
  std::string out = "[\n";
  for (size_t i = 0; i < modes.size(); ++i) {
    out += indent + "  {\"label\": " + quoted(modes[i].label) +
           ", \"frequency_hz\": " + format_double(modes[i].frequency) + "}";
    out += i + 1 < modes.size() ? ",\n" : "\n";
  }
  out += indent + "]";
  return out;
}

std::string string_array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += quoted(items[i]);
  }
  out += "]";
  return out;
}

std::string number_array(const std::array<double, 3>& a) {
  std::string out = "[";
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) out += ", ";
    out += format_double(a[i]);
  }
  out += "]";
  return out;
}

std::vector<ModeSpec> parse_modes(const json& doc, const std::string& path) {
  const json& jm = need(doc, "modes", path);
  if (!jm.is_array() || jm.empty())
    fail(ErrorCode::ParseError, path + ": 'modes' must be a non-empty array");
  std::vector<ModeSpec> modes;
  modes.reserve(jm.size());
  for (const auto& e : jm)
    modes.push_back({need_string(e, "label", path),
                     need_number(e, "frequency_hz", path)});
  return modes;
}

// token scanner for the tabular formats; '#' starts a comment
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream iss(line);
  std::string t;
  while (iss >> t) {
    if (t.front() == '#') break;
    toks.push_back(t);
  }
  return toks;
}

double parse_number(const std::string& tok, const std::string& path, int line) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) {
    std::ostringstream os;
    os << path << ":" << line << ": expected a number, got '" << tok << "'";
    fail(ErrorCode::ParseError, os.str());
  }
  return v;
}

cal::Quad parse_quad(const std::string& tok, const std::string& path,
                     int line) {
  if (tok == "I") return cal::Quad::I;
  if (tok == "Q") return cal::Quad::Q;
  std::ostringstream os;
  os << path << ":" << line << ": quadrature must be I or Q, got '" << tok
     << "'";
  fail(ErrorCode::ParseError, os.str());
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  // shortest representation that parses back to the same double
  char buf[40];
  for (int prec = 1; prec <= 16; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CovarianceMatrix read_covariance(const std::string& path) {
  const json doc = parse_json(path);
  const auto modes = parse_modes(doc, path);

  const std::string ordering = need_string(doc, "ordering", path);
  if (ordering != "xp-interleaved")
    fail(ErrorCode::ParseError,
         path + ": unsupported ordering '" + ordering + "'");
  const double vac = need_number(doc, "vacuum_variance", path);
  if (vac != 1.0)
    fail(ErrorCode::ParseError,
         path + ": vacuum_variance must be 1, got " + format_double(vac));

  const json& jmat = need(doc, "matrix", path);
  const int dim = 2 * static_cast<int>(modes.size());
  if (!jmat.is_array() || static_cast<int>(jmat.size()) != dim)
    fail(ErrorCode::ParseError,
         path + ": 'matrix' must have " + std::to_string(dim) + " rows");
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = jmat[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      fail(ErrorCode::ParseError, path + ": matrix row " + std::to_string(r) +
                                      " must have " + std::to_string(dim) +
                                      " entries");
    for (int c = 0; c < dim; ++c) {
      const json& v = row[static_cast<size_t>(c)];
      if (!v.is_number())
        fail(ErrorCode::ParseError,
             path + ": matrix entry (" + std::to_string(r) + "," +
                 std::to_string(c) + ") is not a number");
      m(r, c) = v.get<double>();
    }
  }
  return CovarianceMatrix(modes, m);
}

void write_covariance(const std::string& path, const CovarianceMatrix& V,
                      const KvList* provenance) {
  std::string out = "{\n";
  out += "  \"modes\": " + mode_array(V.modes(), "  ") + ",\n";
  out += "  \"ordering\": \"xp-interleaved\",\n";
  out += "  \"vacuum_variance\": 1,\n";
  out += "  \"matrix\": [\n";
  const int dim = 2 * V.n_modes();
  for (int r = 0; r < dim; ++r) {
    out += "    [";
    for (int c = 0; c < dim; ++c) {
      if (c) out += ", ";
      out += format_double(V.mat()(r, c));
    }
    out += r + 1 < dim ? "],\n" : "]\n";
  }
  out += "  ]";
  if (provenance && !provenance->empty()) {
    out += ",\n  \"provenance\": {\n";
    for (size_t i = 0; i < provenance->size(); ++i) {
      out += "    " + quoted((*provenance)[i].first) + ": " +
             quoted((*provenance)[i].second);
      out += i + 1 < provenance->size() ? ",\n" : "\n";
    }
    out += "  }";
  }
  out += "\n}\n";
  spit(path, out);
}

std::string report_to_string(const ent::EntanglementReport& r,
                             const ReportManifest& m) {
  std::string out = "{\n";
  out += "  \"tool\": \"covkit\",\n";
  out += "  \"tool_version\": " + quoted(version) + ",\n";
  out += "  \"command\": " + quoted(m.command) + ",\n";
  out += "  \"inputs\": " + string_array(m.inputs) + ",\n";
  out += "  \"config\": {";
  for (size_t i = 0; i < m.config.size(); ++i) {
    if (i) out += ", ";
    out += quoted(m.config[i].first) + ": " + quoted(m.config[i].second);
  }
  out += "},\n";
  out += "  \"physicality\": {\n";
  out += std::string("    \"classical_ok\": ") + bstr(r.physicality.classical_ok) +
         ",\n";
  out += std::string("    \"quantum_ok\": ") + bstr(r.physicality.quantum_ok) +
         ",\n";
  out += "    \"min_eigenvalue\": " +
         format_double(r.physicality.min_eigenvalue) + ",\n";
  out += "    \"min_symplectic_eigenvalue\": " +
         format_double(r.physicality.min_symplectic_eigenvalue) + "\n";
  out += "  },\n";
  out += "  \"ppt\": [\n";
  for (size_t i = 0; i < r.ppt.size(); ++i) {
    const auto& p = r.ppt[i];
    out += "    {\"side_a\": " + string_array(p.bipartition.side_a) +
           ", \"side_b\": " + string_array(p.bipartition.side_b) +
           ", \"nu_tilde_min\": " + format_double(p.nu_tilde_min) +
           ", \"log_negativity\": " + format_double(p.log_negativity) + "}";
    out += i + 1 < r.ppt.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"tripartite_negativity\": " +
         format_double(r.tripartite_negativity) + ",\n";
  out += std::string("  \"fully_inseparable\": ") + bstr(r.fully_inseparable) +
         ",\n";
  out += "  \"genuine_witness\": {\n";
  out += "    \"s_min\": " + format_double(r.genuine.s_min) + ",\n";
  out += "    \"h\": " + number_array(r.genuine.h) + ",\n";
  out += "    \"g\": " + number_array(r.genuine.g) + ",\n";
  out += std::string("    \"restriction\": ") +
         (r.genuine.restriction == ent::WitnessCase::case_i ? "\"case_i\""
                                                            : "\"case_ii\"") +
         ",\n";
  out += "    \"anchor_mode\": " + quoted(r.genuine.anchor_mode) + ",\n";
  out += "    \"bound\": " + format_double(r.genuine.bound) + ",\n";
  out += "    \"raw_bound\": " + format_double(r.genuine.raw_bound) + ",\n";
  out += std::string("    \"refined\": ") + bstr(r.genuine.refined) + "\n";
  out += "  },\n";
  out += std::string("  \"genuinely_entangled\": ") +
         bstr(r.genuinely_entangled) + ",\n";
  out += "  \"purity\": " + format_double(r.purity) + "\n";
  out += "}\n";
  return out;
}

void write_report(const std::string& path, const ent::EntanglementReport& r,
                  const ReportManifest& m) {
  spit(path, report_to_string(r, m));
}

RawMomentSeries read_raw_moments(const std::string& path) {
  std::istringstream in(slurp(path));

  // canonical key order: (mode, quad) pair with the smaller label first, so
  // a row written m2.I m1.Q matches a later m1.Q m2.I
  struct Entry {
    cal::MomentKey key;
    std::vector<double> on, off;
  };
  std::vector<Entry> entries;
  const auto canonical = [](cal::MomentKey k) {
    const auto quad_rank = [](cal::Quad q) { return q == cal::Quad::I ? 0 : 1; };
    if (k.mode_j < k.mode_i ||
        (k.mode_j == k.mode_i && quad_rank(k.quad_j) < quad_rank(k.quad_i))) {
      std::swap(k.mode_i, k.mode_j);
      std::swap(k.quad_i, k.quad_j);
    }
    return k;
  };

  int cycles_header = -1;
  double segment_seconds = 0.0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() == 2 && toks[0] == "cycles") {
      cycles_header = static_cast<int>(parse_number(toks[1], path, lineno));
      continue;
    }
    if (toks.size() == 2 && toks[0] == "segment_seconds") {
      segment_seconds = parse_number(toks[1], path, lineno);
      continue;
    }
    if (toks.size() != 6) {
      std::ostringstream os;
      os << path << ":" << lineno
         << ": expected 'mode_i quad_i mode_j quad_j on off'";
      fail(ErrorCode::ParseError, os.str());
    }
    const cal::MomentKey key = canonical(
        {toks[0], parse_quad(toks[1], path, lineno), toks[2],
         parse_quad(toks[3], path, lineno)});
    const double on = parse_number(toks[4], path, lineno);
    const double off = parse_number(toks[5], path, lineno);
    auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) {
      return e.key.mode_i == key.mode_i && e.key.quad_i == key.quad_i &&
             e.key.mode_j == key.mode_j && e.key.quad_j == key.quad_j;
    });
    if (it == entries.end()) {
      entries.push_back({key, {}, {}});
      it = std::prev(entries.end());
    }
    it->on.push_back(on);
    it->off.push_back(off);
  }
  if (entries.empty())
    fail(ErrorCode::ParseError, path + ": no moment rows found");

  const size_t cycles = entries.front().on.size();
  for (const auto& e : entries)
    if (e.on.size() != cycles)
      fail(ErrorCode::ParseError,
           path + ": ragged cycle counts (every moment key must appear the "
                  "same number of times)");
  if (cycles_header >= 0 && static_cast<size_t>(cycles_header) != cycles)
    fail(ErrorCode::ParseError,
         path + ": 'cycles' header says " + std::to_string(cycles_header) +
             " but keys appear " + std::to_string(cycles) + " times");

  RawMomentSeries series;
  series.n_cycles = static_cast<int>(cycles);
  series.segment_seconds = segment_seconds;
  series.segments.reserve(2 * cycles);
  for (size_t cyc = 0; cyc < cycles; ++cyc) {
    cal::MomentFrame on_frame, off_frame;
    for (const auto& e : entries) {
      on_frame.values.push_back({e.key, e.on[cyc], 0.0});
      off_frame.values.push_back({e.key, e.off[cyc], 0.0});
    }
    series.segments.push_back(std::move(on_frame));
    series.segments.push_back(std::move(off_frame));
  }
  return series;
}

cal::SntjSweep read_sntj(const std::string& path) {
  std::istringstream in(slurp(path));
  cal::SntjSweep sweep;
  bool have_freq = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() == 2 && toks[0] == "label") {
      sweep.label = toks[1];
      continue;
    }
    if (toks.size() == 2 && toks[0] == "frequency_hz") {
      sweep.frequency = parse_number(toks[1], path, lineno);
      have_freq = true;
      continue;
    }
    if (toks.size() != 2) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected 'bias_volts noise_power'";
      fail(ErrorCode::ParseError, os.str());
    }
    sweep.bias_v.push_back(parse_number(toks[0], path, lineno));
    sweep.noise.push_back(parse_number(toks[1], path, lineno));
  }
  if (sweep.label.empty())
    fail(ErrorCode::ParseError, path + ": missing 'label' header");
  if (!have_freq)
    fail(ErrorCode::ParseError, path + ": missing 'frequency_hz' header");
  if (sweep.bias_v.empty())
    fail(ErrorCode::ParseError, path + ": no sweep points found");
  return sweep;
}

cal::CalibrationConstants read_constants(const std::string& path) {
  const json doc = parse_json(path);
  cal::CalibrationConstants c;
  const json& jm = need(doc, "modes", path);
  if (!jm.is_array() || jm.empty())
    fail(ErrorCode::ParseError, path + ": 'modes' must be a non-empty array");
  for (const auto& e : jm)
    c.per_mode.push_back({need_string(e, "label", path),
                          need_number(e, "frequency_hz", path),
                          need_number(e, "gain", path),
                          need_number(e, "temperature_k", path)});
  c.z0 = need_number(doc, "z0_ohm", path);
  c.bw = need_number(doc, "bw_hz", path);
  return c;
}

void write_constants(const std::string& path,
                     const cal::CalibrationConstants& c) {
  std::string out = "{\n";
  out += "  \"modes\": [\n";
  for (size_t i = 0; i < c.per_mode.size(); ++i) {
    const auto& m = c.per_mode[i];
    out += "    {\"label\": " + quoted(m.label) +
           ", \"frequency_hz\": " + format_double(m.frequency) +
           ", \"gain\": " + format_double(m.gain) +
           ", \"temperature_k\": " + format_double(m.temperature) + "}";
    out += i + 1 < c.per_mode.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"z0_ohm\": " + format_double(c.z0) + ",\n";
  out += "  \"bw_hz\": " + format_double(c.bw) + "\n";
  out += "}\n";
  spit(path, out);
}

}  // namespace covkit::io
