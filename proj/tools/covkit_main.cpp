#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "covkit/calibration.hpp"
#include "covkit/entanglement.hpp"
#include "covkit/gaussian.hpp"
#include "covkit/io.hpp"
#include "covkit/parametric.hpp"
#include "covkit/version.hpp"

namespace {

using namespace covkit;

std::string num(double x, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string join_labels(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

struct AnalyzeOpts {
  std::string input;
  std::string out;
  bool strict = false;
  int grid = 81;
};

int cmd_analyze(const AnalyzeOpts& opt) {
  const CovarianceMatrix V = io::read_covariance(opt.input);
  // strict runs gate on machine physicality, not the two-decimal slack of
  // the printed matrices
  const double tol_quantum = opt.strict ? 1e-9 : tol::quantum;

  if (V.n_modes() != 3) {
    const auto phys = physicality_report(V, tol::psd, tol_quantum);
    std::cout << "state: " << V.n_modes() << " modes\n";
    std::cout << "physicality: classical "
              << (phys.classical_ok ? "ok" : "FAILED") << ", quantum "
              << (phys.quantum_ok ? "ok" : "FAILED") << " (min eig "
              << sci(phys.min_eigenvalue) << ", min nu "
              << sci(phys.min_symplectic_eigenvalue) << ")\n";
    std::cout << "note: tripartite analysis requires exactly 3 modes, "
                 "skipping entanglement measures\n";
    if (!opt.out.empty())
      std::cerr << "note: no report written (" << opt.out
                << " requires a three-mode state)\n";
    if (opt.strict && !phys.quantum_ok) {
      std::cerr << "error: physicality failed under --strict\n";
      return 3;
    }
    return 0;
  }

  ent::WitnessConfig wcfg;
  wcfg.grid = opt.grid;
  const auto report = ent::full_report(V, tol::psd, tol_quantum, wcfg);

  std::vector<std::string> labels;
  for (const auto& m : V.modes()) labels.push_back(m.label);
  std::cout << "state: 3 modes (" << join_labels(labels) << ")\n";
  std::cout << "physicality: classical "
            << (report.physicality.classical_ok ? "ok" : "FAILED")
            << ", quantum " << (report.physicality.quantum_ok ? "ok" : "FAILED")
            << " (min eig " << sci(report.physicality.min_eigenvalue)
            << ", min nu " << sci(report.physicality.min_symplectic_eigenvalue)
            << ")\n";
  // one-line summary: the nu_tilde triple, N_tri, S
  std::cout << "summary: nu_tilde = {" << num(report.ppt[0].nu_tilde_min)
            << ", " << num(report.ppt[1].nu_tilde_min) << ", "
            << num(report.ppt[2].nu_tilde_min)
            << "}  N_tri = " << num(report.tripartite_negativity)
            << "  S = " << num(report.genuine.s_min) << "\n";
  for (const auto& p : report.ppt)
    std::cout << "  " << join_labels(p.bipartition.side_a) << " | "
              << join_labels(p.bipartition.side_b)
              << ": nu_tilde_min = " << num(p.nu_tilde_min)
              << ", E_N = " << num(p.log_negativity) << "\n";
  std::cout << "genuine witness: S_min = " << num(report.genuine.s_min)
            << " (case "
            << (report.genuine.restriction == ent::WitnessCase::case_i ? "i"
                                                                       : "ii")
            << ", anchor " << report.genuine.anchor_mode
            << "), bound = " << num(report.genuine.bound, 0) << "\n";
  std::cout << "verdict: fully_inseparable = "
            << (report.fully_inseparable ? "true" : "false")
            << ", genuinely_entangled = "
            << (report.genuinely_entangled ? "true" : "false") << "\n";
  if (std::isfinite(report.purity))
    std::cout << "purity: " << num(report.purity) << "\n";

  bool any_negativity = false;
  for (const auto& p : report.ppt) any_negativity |= p.log_negativity > 0.0;
  if (!any_negativity && !(report.genuine.s_min < report.genuine.bound))
    std::cout << "no entanglement detected\n";

  if (opt.strict && !report.physicality.quantum_ok) {
    std::cerr << "error: physicality failed under --strict\n";
    return 3;
  }

  if (!opt.out.empty()) {
    io::ReportManifest manifest;
    manifest.command = "analyze";
    manifest.inputs = {opt.input};
    manifest.config = {
        {"tol_psd", io::format_double(tol::psd)},
        {"tol_quantum", io::format_double(tol_quantum)},
        {"strict", opt.strict ? "true" : "false"},
        {"witness_grid", std::to_string(wcfg.grid)},
        {"witness_max_iter", std::to_string(wcfg.max_iter)},
        {"witness_ftol", io::format_double(wcfg.ftol)},
    };
    io::write_report(opt.out, report, manifest);
    std::cout << "report written to " << opt.out << "\n";
  }
  return 0;
}

struct SimulateOpts {
  std::string scheme;
  double g1 = 0.0, g2 = 0.0;
  std::string mode;
  double time = 0.0;
  bool time_set = false;
  std::vector<std::string> pumps;
  std::string out;
};

sim::PumpTone parse_pump(const std::string& token) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t colon = token.find(':', start);
    parts.push_back(token.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3)
    fail(ErrorCode::ParseError,
         "--pump expects FREQ:COUPLING[:PHASE], got '" + token + "'");
  const auto number = [&](const std::string& s) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size())
      fail(ErrorCode::ParseError, "--pump field '" + s + "' is not a number");
    return v;
  };
  sim::PumpTone tone;
  tone.frequency = number(parts[0]);
  tone.coupling = number(parts[1]);
  if (parts.size() == 3) tone.phase = number(parts[2]);
  return tone;
}

int cmd_simulate(const SimulateOpts& opt) {
  const bool unitary = opt.mode == "unitary";
  if (unitary && !opt.time_set) {
    std::cerr << "error: --mode unitary requires --time\n";
    return 2;
  }
  if (!unitary && opt.time_set)
    std::cerr << "warning: --time is ignored in steady mode\n";

  sim::Preset preset;
  io::KvList prov;
  prov.emplace_back("generator", "covkit simulate");
  if (!opt.scheme.empty()) {
    const auto scheme = opt.scheme == "cm" ? sim::Scheme::cm : sim::Scheme::bs;
    preset = sim::scheme_preset(scheme, opt.g1, opt.g2);
    prov.emplace_back("scheme", opt.scheme);
    prov.emplace_back("g1", io::format_double(opt.g1));
    prov.emplace_back("g2", io::format_double(opt.g2));
  } else {
    // explicit pump list against the reference mode stack
    preset = sim::scheme_preset(sim::Scheme::cm, 0.0, 0.0);
    preset.pumps.clear();
    std::vector<sim::RwaTerm> terms;
    for (const auto& token : opt.pumps) {
      const auto tone = parse_pump(token);
      preset.pumps.push_back(tone);
      const auto matched = sim::select_rwa_terms(preset.config.modes, tone,
                                                 preset.config.rwa_tol);
      if (matched.empty())
        std::cerr << "warning: no resonant terms for pump at "
                  << sci(tone.frequency) << " Hz\n";
      terms.insert(terms.end(), matched.begin(), matched.end());
    }
    preset.gen = sim::build_generator(preset.config.modes, terms);
    prov.emplace_back("scheme", "explicit-pumps");
  }
  {
    std::string plist;
    for (size_t i = 0; i < preset.pumps.size(); ++i) {
      if (i) plist += "; ";
      plist += "f=" + io::format_double(preset.pumps[i].frequency) +
               " g=" + io::format_double(preset.pumps[i].coupling) +
               " phase=" + io::format_double(preset.pumps[i].phase);
    }
    prov.emplace_back("pumps", plist);
  }
  {
    std::string ks;
    for (size_t i = 0; i < preset.config.kappa.size(); ++i) {
      if (i) ks += " ";
      ks += io::format_double(preset.config.kappa[i]);
    }
    prov.emplace_back("kappa_rad_s", ks);
    prov.emplace_back("rwa_tol_hz", io::format_double(preset.config.rwa_tol));
  }
  prov.emplace_back("mode", unitary ? "unitary" : "steady");
  if (unitary) prov.emplace_back("time_s", io::format_double(opt.time));
  prov.emplace_back("tool_version", version);

  try {
    if (unitary) {
      const int dim = 2 * static_cast<int>(preset.config.modes.size());
      const CovarianceMatrix vac(preset.config.modes,
                                 Eigen::MatrixXd::Identity(dim, dim));
      const auto V = sim::unitary_propagate(vac, preset.gen, opt.time);
      io::write_covariance(opt.out, V, &prov);
      std::cout << "unitary propagation over " << sci(opt.time)
                << " s, covariance written to " << opt.out << "\n";
    } else {
      const auto ss = sim::steady_state_output(preset.config, preset.gen);
      prov.emplace_back("lyapunov_residual",
                        io::format_double(ss.lyapunov_residual));
      io::write_covariance(opt.out, ss.output, &prov);
      std::cout << "steady state solved (stability margin "
                << sci(sim::stability_margin(preset.config, preset.gen))
                << " rad/s, lyapunov residual " << sci(ss.lyapunov_residual)
                << "), covariance written to " << opt.out << "\n";
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnstableSystem) {
      std::cerr << "error: " << e.what() << "\n";
      if (!opt.scheme.empty()) {
        const auto scheme =
            opt.scheme == "cm" ? sim::Scheme::cm : sim::Scheme::bs;
        std::cerr << "equal-coupling oscillation threshold for scheme "
                  << opt.scheme << " is "
                  << sci(sim::equal_coupling_threshold(scheme)) << " rad/s\n";
      }
      return 4;
    }
    throw;
  }
  return 0;
}

struct CalibrateOpts {
  std::vector<std::string> sntj;
  std::string raw;
  std::string out_cal;
  std::string out_cov;
};

int cmd_calibrate(const CalibrateOpts& opt) {
  cal::CalibrationConstants constants;
  io::KvList prov;
  prov.emplace_back("generator", "covkit calibrate");
  for (const auto& path : opt.sntj) {
    const auto sweep = io::read_sntj(path);
    cal::SntjFit fit;
    try {
      fit = cal::sntj_fit(sweep, sweep.frequency);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::FitNotConverged ||
          e.code() == ErrorCode::InsufficientBiasRange) {
        std::cerr << "error: SNTJ fit failed for mode '" << sweep.label
                  << "': " << e.what() << "\n";
        return 5;
      }
      throw;
    }
    constants.per_mode.push_back(
        {sweep.label, sweep.frequency, fit.gain, fit.temperature});
    std::cout << sweep.label << ": G = " << sci(fit.gain) << " ("
              << num(10.0 * std::log10(fit.gain), 1) << " dB), T = "
              << sci(fit.temperature) << " K, T_sys = " << sci(fit.t_sys)
              << " K\n";
    prov.emplace_back("sntj_" + sweep.label, path);
  }

  const auto series = io::read_raw_moments(opt.raw);
  const auto record = cal::chop_difference(series.segments, series.n_cycles,
                                           series.segment_seconds);
  const auto V = cal::assemble_covariance(record, constants);

  io::write_constants(opt.out_cal, constants);
  prov.emplace_back("raw_moments", opt.raw);
  prov.emplace_back("cycles", std::to_string(record.n_cycles));
  prov.emplace_back("tool_version", version);
  io::write_covariance(opt.out_cov, V, &prov);
  std::cout << "calibrated " << V.n_modes() << " modes over "
            << record.n_cycles << " chop cycles\n";
  std::cout << "constants written to " << opt.out_cal
            << ", covariance written to " << opt.out_cov << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covkit: multimode Gaussian microwave state toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("covkit ") + version);

  AnalyzeOpts an;
  auto* analyze =
      app.add_subcommand("analyze", "certify entanglement of a covariance file");
  analyze->add_option("--input", an.input, "covariance file")->required();
  analyze->add_flag("--strict", an.strict,
                    "fail (exit 3) on machine-precision physicality");
  analyze->add_option("--genuine-grid", an.grid,
                      "coarse grid points per axis for the genuine witness")
      ->check(CLI::Range(3, 100000));
  analyze->add_option("--out", an.out, "write a machine report here");

  SimulateOpts si;
  auto* simulate =
      app.add_subcommand("simulate", "simulate a pumped parametric cavity");
  auto* scheme_opt =
      simulate->add_option("--scheme", si.scheme, "preset pump scheme")
          ->check(CLI::IsMember({"cm", "bs"}));
  simulate->add_option("--g1", si.g1, "first pump coupling, rad/s");
  simulate->add_option("--g2", si.g2, "second pump coupling, rad/s");
  simulate->add_option("--mode", si.mode, "unitary or steady")
      ->check(CLI::IsMember({"unitary", "steady"}))
      ->required();
  auto* time_opt =
      simulate->add_option("--time", si.time, "propagation time, s (unitary)");
  auto* pump_opt = simulate->add_option(
      "--pump", si.pumps, "explicit pump FREQ:COUPLING[:PHASE], repeatable");
  simulate->add_option("--out", si.out, "output covariance file")->required();
  scheme_opt->excludes(pump_opt);
  pump_opt->excludes(scheme_opt);

  CalibrateOpts ca;
  auto* calibrate = app.add_subcommand(
      "calibrate", "fit SNTJ sweeps and scale raw moments to absolute units");
  calibrate->add_option("--sntj", ca.sntj, "SNTJ sweep file, one per mode")
      ->required();
  calibrate->add_option("--raw", ca.raw, "raw moments file")->required();
  calibrate->add_option("--out-cal", ca.out_cal, "calibration constants output")
      ->required();
  calibrate->add_option("--out-cov", ca.out_cov, "covariance output")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  si.time_set = time_opt->count() > 0;
  if (simulate->parsed() && si.scheme.empty() && si.pumps.empty()) {
    std::cerr << "error: simulate needs --scheme or at least one --pump\n";
    return 2;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(an);
    if (simulate->parsed()) return cmd_simulate(si);
    if (calibrate->parsed()) return cmd_calibrate(ca);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
