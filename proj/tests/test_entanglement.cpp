#include <algorithm>
#include <cmath>
#include <functional>

#include "covkit/entanglement.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace covkit;
using namespace covkit::ent;

namespace {

bool throws_code(ErrorCode want, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == want;
  }
  return false;
}

// Simon's closed form for 1 x 1 states: nu~^2 = (d - sqrt(d^2 - 4 det V)) / 2
// with d = det A + det B - 2 det C
double two_mode_ppt_closed_form(const Eigen::MatrixXd& v) {
  const double det_a = v.block<2, 2>(0, 0).determinant();
  const double det_b = v.block<2, 2>(2, 2).determinant();
  const double det_c = v.block<2, 2>(0, 2).determinant();
  const double d = det_a + det_b - 2.0 * det_c;
  return std::sqrt((d - std::sqrt(d * d - 4.0 * v.determinant())) / 2.0);
}

// x <-> p on one mode (a local pi/2 phase rotation up to sign)
Eigen::MatrixXd swap_xp(const Eigen::MatrixXd& v, std::vector<int> modes) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(v.rows(), v.cols());
  for (int k = 0; k < v.rows() / 2; ++k) {
    if (std::find(modes.begin(), modes.end(), k) != modes.end()) {
      S(2 * k, 2 * k + 1) = 1.0;
      S(2 * k + 1, 2 * k) = -1.0;
    } else {
      S(2 * k, 2 * k) = 1.0;
      S(2 * k + 1, 2 * k + 1) = 1.0;
    }
  }
  return S * v * S.transpose();
}

}  // namespace

TEST_CASE("ppt_test reproduces the frozen CM bipartition spectrum") {
  const auto v = cm_state();
  const auto a = ppt_test(v, {{"m1"}, {"m2", "m3"}});
  const auto b = ppt_test(v, {{"m2"}, {"m1", "m3"}});
  const auto c = ppt_test(v, {{"m3"}, {"m1", "m2"}});
  CHECK(a.nu_tilde_min == doctest::Approx(0.47489265352937443).epsilon(1e-9));
  CHECK(b.nu_tilde_min == doctest::Approx(0.39185473396782405).epsilon(1e-9));
  CHECK(c.nu_tilde_min == doctest::Approx(0.57273903318863773).epsilon(1e-9));
  CHECK(a.log_negativity == doctest::Approx(0.74466649305740262).epsilon(1e-9));
  CHECK(b.log_negativity == doctest::Approx(0.93686408448484926).epsilon(1e-9));
  CHECK(c.log_negativity == doctest::Approx(0.55732510547281477).epsilon(1e-9));
}

TEST_CASE("ppt_test reproduces the frozen BS bipartition spectrum") {
  const auto v = bs_state();
  CHECK(ppt_test(v, {{"m1"}, {"m2", "m3"}}).nu_tilde_min ==
        doctest::Approx(0.30668553609450427).epsilon(1e-9));
  CHECK(ppt_test(v, {{"m2"}, {"m1", "m3"}}).nu_tilde_min ==
        doctest::Approx(0.4818629949671604).epsilon(1e-9));
  CHECK(ppt_test(v, {{"m3"}, {"m1", "m2"}}).nu_tilde_min ==
        doctest::Approx(0.3878226309309416).epsilon(1e-9));
}

TEST_CASE("ppt_test flips the smaller side, so orientation is irrelevant") {
  const auto v = cm_state();
  const auto fwd = ppt_test(v, {{"m1"}, {"m2", "m3"}});
  const auto rev = ppt_test(v, {{"m2", "m3"}, {"m1"}});
  CHECK(fwd.nu_tilde_min == rev.nu_tilde_min);
}

TEST_CASE("ppt_test validates bipartitions") {
  const auto v = cm_state();
  CHECK(throws_code(ErrorCode::InvalidBipartition,
                    [&] { ppt_test(v, {{}, {"m1", "m2", "m3"}}); }));
  CHECK(throws_code(ErrorCode::InvalidBipartition,
                    [&] { ppt_test(v, {{"m1"}, {"m2"}}); }));
  CHECK(throws_code(ErrorCode::InvalidBipartition,
                    [&] { ppt_test(v, {{"m1", "m2"}, {"m2", "m3"}}); }));
  CHECK(throws_code(ErrorCode::InvalidBipartition,
                    [&] { ppt_test(v, {{"m1", "m1"}, {"m2", "m3"}}); }));
  CHECK(throws_code(ErrorCode::UnknownMode,
                    [&] { ppt_test(v, {{"m1"}, {"m2", "zz"}}); }));
}

TEST_CASE("two-mode PPT agrees with the analytic formula") {
  std::mt19937 rng(7721);
  const std::vector<ModeSpec> pair = {{"a", 1e9}, {"b", 2e9}};
  for (int it = 0; it < 40; ++it) {
    const Eigen::MatrixXd m = random_physical_entries(2, rng);
    const CovarianceMatrix v(pair, m);
    const auto res = ppt_test(v, {{"a"}, {"b"}});
    CHECK(res.nu_tilde_min ==
          doctest::Approx(two_mode_ppt_closed_form(m)).epsilon(1e-10));
  }
  const CovarianceMatrix tms(pair, tms_entries(0.5));
  CHECK(ppt_test(tms, {{"a"}, {"b"}}).log_negativity ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tripartite negativity: frozen values and separable cutoffs") {
  CHECK(tripartite_negativity(cm_state()) ==
        doctest::Approx(0.72987586557836548).epsilon(1e-9));
  CHECK(tripartite_negativity(bs_state()) ==
        doctest::Approx(0.93498738142893645).epsilon(1e-9));

  const CovarianceMatrix vac(reference_triple(), Eigen::MatrixXd::Identity(6, 6));
  CHECK(tripartite_negativity(vac) == 0.0);

  // vacuum (x) TMS: two splits entangled, one separable -> zero by convention
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(6, 6);
  m.block<4, 4>(2, 2) = tms_entries(0.5);
  const CovarianceMatrix mixed(reference_triple(), m);
  CHECK(ppt_test(mixed, {{"m1"}, {"m2", "m3"}}).log_negativity == 0.0);
  CHECK(ppt_test(mixed, {{"m2"}, {"m1", "m3"}}).log_negativity ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ppt_test(mixed, {{"m3"}, {"m1", "m2"}}).log_negativity ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tripartite_negativity(mixed) == 0.0);

  const CovarianceMatrix two({{"a", 1e9}, {"b", 2e9}}, tms_entries(0.5));
  CHECK(throws_code(ErrorCode::WrongModeCount,
                    [&] { tripartite_negativity(two); }));
}

TEST_CASE("evaluate_s is the u/v variance sum") {
  const CovarianceMatrix vac(reference_triple(), Eigen::MatrixXd::Identity(6, 6));
  CHECK(evaluate_s(vac, {1, 1, 1}, {1, 1, 1}) == doctest::Approx(6.0));
  CHECK(evaluate_s(vac, {1, 0.5, 0}, {0, 1, -1}) ==
        doctest::Approx(1.25 + 2.0));

  // by hand on the CM matrix: h^T Vxx h + g^T Vpp g
  const auto v = cm_state();
  const std::array<double, 3> h{1.0, -0.5, 0.25}, g{0.0, 1.0, -1.0};
  double want = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      want += h[static_cast<size_t>(i)] * h[static_cast<size_t>(j)] *
              v.mat()(2 * i, 2 * j);
      want += g[static_cast<size_t>(i)] * g[static_cast<size_t>(j)] *
              v.mat()(2 * i + 1, 2 * j + 1);
    }
  CHECK(evaluate_s(v, h, g) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("genuine witness floor: vacuum pins S at the bound") {
  const CovarianceMatrix vac(reference_triple(), Eigen::MatrixXd::Identity(6, 6));
  for (int kase = 0; kase < 2; ++kase)
    for (int anchor = 0; anchor < 3; ++anchor) {
      WitnessConfig cfg;
      cfg.only_case = kase;
      cfg.only_anchor = anchor;
      const auto res = genuine_witness(vac, cfg);
      CHECK(res.s_min == doctest::Approx(2.0).epsilon(1e-6));
      CHECK(res.anchor_mode == reference_triple()[static_cast<size_t>(anchor)].label);
    }
  const auto all = genuine_witness(vac);
  CHECK(all.s_min == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(all.bound == 2.0);
}

TEST_CASE("genuine witness reproduces the frozen CM minimum") {
  const auto res = genuine_witness(cm_state());
  CHECK(res.s_min == doctest::Approx(1.4944860288495621).epsilon(1e-9));
  CHECK(res.restriction == WitnessCase::case_ii);
  CHECK(res.anchor_mode == "m2");
  CHECK(res.refined);
  CHECK(res.h[0] == doctest::Approx(-0.61156814).epsilon(1e-6));
  CHECK(res.h[1] == 1.0);
  CHECK(res.h[2] == doctest::Approx(-0.61452924).epsilon(1e-6));
  CHECK(res.g[0] == doctest::Approx(0.61452924).epsilon(1e-6));
  CHECK(res.g[1] == 1.0);
  CHECK(res.g[2] == doctest::Approx(0.61156814).epsilon(1e-6));
  // the value the optimizer reports is what the quadratic form evaluates to
  CHECK(evaluate_s(cm_state(), res.h, res.g) ==
        doctest::Approx(res.s_min).epsilon(1e-12));
  // case (ii) collapses the raw permutation bound to 2
  CHECK(res.raw_bound == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("genuine witness reproduces the frozen BS minimum") {
  const auto res = genuine_witness(bs_state());
  CHECK(res.s_min == doctest::Approx(1.1963749246845881).epsilon(1e-9));
  CHECK(res.restriction == WitnessCase::case_ii);
  CHECK(res.anchor_mode == "m1");
  CHECK(res.h[1] == doctest::Approx(-0.64985154).epsilon(1e-6));
  CHECK(res.h[2] == doctest::Approx(-0.6450844).epsilon(1e-6));
  CHECK(res.g[1] == doctest::Approx(0.6450844).epsilon(1e-6));
  CHECK(res.g[2] == doctest::Approx(0.64985154).epsilon(1e-6));
}

TEST_CASE("witness under local and global x<->p swaps") {
  const auto base = cm_entries();

  // a single-mode swap leaves every PPT spectrum alone (local symplectic)...
  const CovarianceMatrix one(reference_triple(), swap_xp(base, {0}));
  const auto pa = ppt_test(one, {{"m1"}, {"m2", "m3"}});
  CHECK(pa.nu_tilde_min == doctest::Approx(0.47489265352937443).epsilon(1e-9));
  CHECK(tripartite_negativity(one) ==
        doctest::Approx(0.72987586557836548).epsilon(1e-9));
  // ...but moves the correlations out of the witness's fixed quadrature plane
  CHECK(genuine_witness(one).s_min ==
        doctest::Approx(2.5856782271480401).epsilon(1e-8));

  // swapping all three modes keeps S (h and g trade roles)
  const CovarianceMatrix all(reference_triple(), swap_xp(base, {0, 1, 2}));
  CHECK(genuine_witness(all).s_min ==
        doctest::Approx(1.4944860288495621).epsilon(1e-8));
}

TEST_CASE("witness rejects unusable inputs and configs") {
  const CovarianceMatrix two({{"a", 1e9}, {"b", 2e9}}, tms_entries(0.5));
  CHECK(throws_code(ErrorCode::WrongModeCount, [&] { genuine_witness(two); }));

  WitnessConfig tiny;
  tiny.grid = 2;
  CHECK(throws_code(ErrorCode::NonPositiveInput,
                    [&] { genuine_witness(cm_state(), tiny); }));

  Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(6, 6);
  neg(0, 0) = -1.0;
  CHECK(throws_code(ErrorCode::NotPositiveSemidefinite, [&] {
    genuine_witness(CovarianceMatrix(reference_triple(), neg));
  }));
}

TEST_CASE("capped simplex falls back to the coarse grid answer") {
  WitnessConfig cfg;
  cfg.max_iter = 1;
  const auto res = genuine_witness(cm_state(), cfg);
  CHECK_FALSE(res.refined);
  // grid resolution 2/80 = 0.025 per axis; quadratic bowl keeps the gap small
  CHECK(res.s_min == doctest::Approx(1.4944860288495621).epsilon(0.02));
  CHECK(res.s_min >= 1.4944860288495621 - 1e-12);
}

TEST_CASE("denser grids only improve the coarse minimum") {
  WitnessConfig coarse, dense;
  coarse.grid = 21;
  dense.grid = 161;
  const auto rc = genuine_witness(cm_state(), coarse);
  const auto rd = genuine_witness(cm_state(), dense);
  CHECK(rc.s_min == doctest::Approx(1.4944860288495621).epsilon(1e-6));
  CHECK(rd.s_min == doctest::Approx(1.4944860288495621).epsilon(1e-9));
}

TEST_CASE("full_report stitches the verdicts together") {
  const auto rep = full_report(cm_state());
  CHECK(rep.physicality.quantum_ok);
  CHECK(rep.fully_inseparable);
  CHECK(rep.genuinely_entangled);
  CHECK(rep.tripartite_negativity ==
        doctest::Approx(0.72987586557836548).epsilon(1e-9));
  CHECK(rep.genuine.s_min == doctest::Approx(1.4944860288495621).epsilon(1e-9));
  CHECK(rep.purity == doctest::Approx(0.4708996708439005).epsilon(1e-9));

  // internal consistency: the geometric mean recomputed from the parts is the
  // stored field, bit for bit
  const double recomputed = std::cbrt(rep.ppt[0].log_negativity *
                                      rep.ppt[1].log_negativity *
                                      rep.ppt[2].log_negativity);
  CHECK(rep.tripartite_negativity == recomputed);

  const CovarianceMatrix vac(reference_triple(), Eigen::MatrixXd::Identity(6, 6));
  const auto vrep = full_report(vac);
  CHECK_FALSE(vrep.fully_inseparable);
  CHECK_FALSE(vrep.genuinely_entangled);
  CHECK(vrep.tripartite_negativity == 0.0);
  CHECK(vrep.purity == doctest::Approx(1.0));
}

TEST_CASE("full_report survives classically invalid input") {
  Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(6, 6);
  neg(0, 0) = -2.0;
  const auto rep = full_report(CovarianceMatrix(reference_triple(), neg));
  CHECK_FALSE(rep.physicality.classical_ok);
  CHECK(std::isnan(rep.tripartite_negativity));
  CHECK(std::isnan(rep.genuine.s_min));
  CHECK(std::isnan(rep.purity));
  CHECK_FALSE(rep.fully_inseparable);
  CHECK_FALSE(rep.genuinely_entangled);
}
