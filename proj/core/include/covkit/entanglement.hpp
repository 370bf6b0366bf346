#pragma once

#include <array>
#include <string>

#include "covkit/gaussian.hpp"

namespace covkit::ent {

struct PptResult {
  Bipartition bipartition;
  double nu_tilde_min = 0.0;
  double log_negativity = 0.0;  // max(0, -ln nu_tilde_min)
};

enum class WitnessCase { case_i, case_ii };

struct WitnessConfig {
  int grid = 81;        // coarse grid points per axis on [-1,1]
  int max_iter = 500;   // simplex iteration cap
  double ftol = 1e-10;  // simplex spread tolerance
  // restrict the search to one family / anchor (-1 = all); used by tests
  int only_case = -1;   // 0 = case_i, 1 = case_ii
  int only_anchor = -1; // mode index
};

struct GenuineWitnessResult {
  double s_min = 0.0;
  std::array<double, 3> h{};  // u = h1 x1 + h2 x2 + h3 x3
  std::array<double, 3> g{};  // v = g1 p1 + g2 p2 + g3 p3
  WitnessCase restriction = WitnessCase::case_i;
  std::string anchor_mode;    // mode l with h_l = g_l = 1
  double bound = 2.0;         // simplified bound under the restrictions
  double raw_bound = 2.0;     // 2 min_perm {|h_i g_i| + |h_j g_j + h_k g_k|}
  bool refined = true;        // false: simplex hit the cap, coarse minimum reported
};

struct EntanglementReport {
  PhysicalityReport physicality;
  std::array<PptResult, 3> ppt;  // bipartitions {1}|{2,3}, {2}|{1,3}, {3}|{1,2}
  double tripartite_negativity = 0.0;
  bool fully_inseparable = false;
  GenuineWitnessResult genuine;
  bool genuinely_entangled = false;  // s_min < bound
  double purity = 0.0;
};

// PPT test for one bipartition: flips the smaller side (side_a on ties)
PptResult ppt_test(const CovarianceMatrix& V, const Bipartition& b);

// geometric mean of the three bipartition log negativities, 0 if any is 0
double tripartite_negativity(const CovarianceMatrix& V);

// S = h^T Vxx h + g^T Vpp g  (variance of u plus variance of v)
double evaluate_s(const CovarianceMatrix& V, const std::array<double, 3>& h,
                  const std::array<double, 3>& g);

// minimizes evaluate_s over the two restricted coefficient families and all
// anchor choices; deterministic grid + Nelder-Mead
GenuineWitnessResult genuine_witness(const CovarianceMatrix& V,
                                     const WitnessConfig& config = {});

EntanglementReport full_report(const CovarianceMatrix& V,
                               double tol_psd = tol::psd,
                               double tol_quantum = tol::quantum,
                               const WitnessConfig& config = {});

}  // namespace covkit::ent
