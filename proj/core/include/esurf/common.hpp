// Shared numeric types and the error type used across the library.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace esurf {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;
using RowVecX = Eigen::RowVectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kSqrt3 = std::numbers::sqrt3;
inline constexpr cplx kI{0.0, 1.0};

/// Failure kinds raised by the numerical layer. The CLI maps every one of
/// these to exit code 3.
enum class ErrorCode {
  defective_pair,
  ambiguous_match,
  near_degenerate,
  negative_determinant,
  stencil_crosses_ep,
  grid_hits_ep,
  ep_on_path,
  no_closure,
  ref_on_spectrum,
  step_size_underflow,
  truncation_violation,
  vanishing_projection,
  singular_state_matrix,
  branch_ambiguity,
  invalid_argument,
};

std::string_view to_string(ErrorCode code);

class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace esurf
