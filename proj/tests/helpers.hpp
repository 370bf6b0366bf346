#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "covkit/gaussian.hpp"

inline std::string fixture(const std::string& name) {
  return std::string(COVKIT_FIXTURES) + "/" + name;
}

inline std::vector<covkit::ModeSpec> reference_triple() {
  return {{"m1", 4.20e9}, {"m2", 6.16e9}, {"m3", 7.55e9}};
}

// the printed CM-scheme matrix, transcribed digit for digit
inline Eigen::MatrixXd cm_entries() {
  Eigen::MatrixXd m(6, 6);
  m << 2.05, 0.00, 1.87, 0.00, 0.88, 0.00,
       0.00, 2.04, 0.00, -1.87, 0.00, 0.88,
       1.87, 0.00, 2.85, 0.00, 1.56, 0.00,
       0.00, -1.87, 0.00, 2.85, 0.00, -1.56,
       0.88, 0.00, 1.56, 0.00, 1.79, 0.00,
       0.00, 0.88, 0.00, -1.56, 0.00, 1.79;
  return m;
}

inline Eigen::MatrixXd bs_entries() {
  Eigen::MatrixXd m(6, 6);
  m << 3.91, 0.00, 2.34, 0.00, 2.78, 0.00,
       0.00, 3.91, 0.00, -2.33, 0.00, -2.78,
       2.34, 0.00, 2.28, 0.00, 1.45, 0.00,
       0.00, -2.33, 0.00, 2.28, 0.00, 1.45,
       2.78, 0.00, 1.45, 0.00, 2.72, 0.00,
       0.00, -2.78, 0.00, 1.45, 0.00, 2.72;
  return m;
}

inline covkit::CovarianceMatrix cm_state() { return {reference_triple(), cm_entries()}; }
inline covkit::CovarianceMatrix bs_state() { return {reference_triple(), bs_entries()}; }

inline Eigen::MatrixXd tms_entries(double r) {
  const double c = std::cosh(2.0 * r), s = std::sinh(2.0 * r);
  Eigen::MatrixXd m(4, 4);
  m << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return m;
}

// random symplectic built from exact elementary blocks (squeezers, phase
// rotations, beamsplitters), so S Omega S^T = Omega holds to rounding only
inline Eigen::MatrixXd random_symplectic(int n_modes, std::mt19937& rng,
                                         double squeeze_scale = 0.5) {
  const int dim = 2 * n_modes;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.141592653589793);
  std::uniform_real_distribution<double> sq(-squeeze_scale, squeeze_scale);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(dim, dim);
  const auto rotate = [&](int k) {
    const double th = angle(rng);
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(dim, dim);
    R(2 * k, 2 * k) = std::cos(th);
    R(2 * k, 2 * k + 1) = std::sin(th);
    R(2 * k + 1, 2 * k) = -std::sin(th);
    R(2 * k + 1, 2 * k + 1) = std::cos(th);
    S = R * S;
  };
  const auto squeeze = [&](int k) {
    const double r = sq(rng);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(dim, dim);
    Z(2 * k, 2 * k) = std::exp(r);
    Z(2 * k + 1, 2 * k + 1) = std::exp(-r);
    S = Z * S;
  };
  const auto beamsplit = [&](int a, int b) {
    const double th = angle(rng);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(dim, dim);
    for (int q = 0; q < 2; ++q) {
      B(2 * a + q, 2 * a + q) = std::cos(th);
      B(2 * a + q, 2 * b + q) = std::sin(th);
      B(2 * b + q, 2 * a + q) = -std::sin(th);
      B(2 * b + q, 2 * b + q) = std::cos(th);
    }
    S = B * S;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < n_modes; ++k) {
      rotate(k);
      squeeze(k);
    }
    for (int a = 0; a < n_modes; ++a)
      for (int b = a + 1; b < n_modes; ++b) beamsplit(a, b);
  }
  return S;
}

// random quantum-physical state: S diag(nbar) S^T with every nbar >= 1
inline Eigen::MatrixXd random_physical_entries(int n_modes, std::mt19937& rng) {
  std::uniform_real_distribution<double> th(1.0, 3.0);
  const int dim = 2 * n_modes;
  Eigen::VectorXd d(dim);
  for (int k = 0; k < n_modes; ++k) d(2 * k) = d(2 * k + 1) = th(rng);
  const Eigen::MatrixXd S = random_symplectic(n_modes, rng);
  return S * d.asDiagonal() * S.transpose();
}
