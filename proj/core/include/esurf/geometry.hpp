// Non-Hermitian quantum geometric tensor in a three-direction chart and the
// three-form curvature built from it.
#pragma once

#include "esurf/common.hpp"
#include "esurf/eigensystem.hpp"
#include "esurf/models.hpp"

#include <array>
#include <functional>
#include <string>

namespace esurf {

using Coords3 = std::array<double, 3>;

/// A Hamiltonian family over three chart coordinates with its analytic
/// coordinate derivatives.
struct Chart3 {
  std::array<std::string, 3> names;
  std::function<MatX(const Coords3&)> h;
  std::function<std::array<MatX, 3>(const Coords3&)> dh;
};

/// Omega1 = R cos(a) e^{i b}, Omega2 = R sin(a) e^{i f} on the ES model with
/// loss rate kappa. Coordinates are (alpha, beta, phi).
Chart3 sphere_chart(double radius, double kappa);

/// Parameter point of the sphere chart.
ESPoint sphere_point(double radius, double kappa, const Coords3& x);

struct QGTResult {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d f = Eigen::Matrix3d::Zero();
  int band = 0;
  Coords3 at{};
  /// Raw tensor before (anti)symmetrisation.
  Eigen::Matrix3cd chi = Eigen::Matrix3cd::Zero();
};

struct QGTOptions {
  /// Minimum |E_band - E_n| (relative to the matrix norm scale) before
  /// NearDegenerate is raised.
  double gap_tol = 1e-6;
  /// Use |<L_b|dH|R_n>| |<L_b|dH|R_n>| as printed in the literature. Off by
  /// default; the result is not a tensor and is kept for comparison runs.
  bool verbatim_abs = false;
  EigOptions eig{};
};

/// Sum-over-states QGT of `band` in the eigensystem `es` of H, given the three
/// derivative matrices. chi_mn = sum_{n != b} <L_b|d_m H|R_n><L_n|d_n H|R_b> /
/// (E_b - E_n)^2; g = Re(chi + chi^T)/2, F = Im(chi - chi^T).
QGTResult qgt_sum(const BiorthEigensystem& es, const std::array<MatX, 3>& dh, int band,
                  const QGTOptions& options = {});

/// Convenience overload: diagonalises chart.h(x) and takes the band index in
/// the (Re, Im)-sorted order.
QGTResult qgt_sum(const Chart3& chart, const Coords3& x, int band,
                  const QGTOptions& options = {});

/// Finite-difference oracle: chi_mn = <d_m L|(1 - |R><L|)|d_n R> with central
/// differences of step h, band followed through the stencil by match_bands.
/// Throws StencilCrossesEP when the band cannot be followed.
QGTResult qgt_fd(const Chart3& chart, const Coords3& x, int band, double h,
                 const QGTOptions& options = {});

struct ThreeForm {
  double m_metric = 0.0;      // 4 sqrt(det g)
  double m_curv_paper = 0.0;  // -(F_01 + F_20) / 2
  double m_curv_sym = 0.0;    // -(F_01 + F_12 + F_20) / 2
  double det_g = 0.0;
};

/// Throws NegativeDeterminant when det g < -negative_tol; smaller negative
/// values are clamped to zero.
ThreeForm three_form(const QGTResult& q, double negative_tol = 1e-9);

}  // namespace esurf
