#include "esurf/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace esurf {
namespace {

std::array<Mat3, 9> make_gell_mann() {
  std::array<Mat3, 9> l;
  for (auto& m : l) m.setZero();
  l[1](0, 1) = l[1](1, 0) = 1.0;
  l[2](0, 1) = -kI;
  l[2](1, 0) = kI;
  l[3](0, 0) = 1.0;
  l[3](1, 1) = -1.0;
  l[4](0, 2) = l[4](2, 0) = 1.0;
  l[5](0, 2) = -kI;
  l[5](2, 0) = kI;
  l[6](1, 2) = l[6](2, 1) = 1.0;
  l[7](1, 2) = -kI;
  l[7](2, 1) = kI;
  l[8](0, 0) = l[8](1, 1) = 1.0 / kSqrt3;
  l[8](2, 2) = -2.0 / kSqrt3;
  return l;
}

const std::array<Mat3, 9>& basis() {
  static const std::array<Mat3, 9> l = make_gell_mann();
  return l;
}

}  // namespace

const Mat3& gell_mann(int index) {
  if (index < 1 || index > 8) {
    throw std::out_of_range("Gell-Mann index must be in 1..8, got " + std::to_string(index));
  }
  return basis()[index];
}

Mat3 commutator(const Mat3& a, const Mat3& b) { return a * b - b * a; }

Mat3 build_h_es(const ESPoint& p) {
  const auto& l = basis();
  return p.q1 * l[1] + p.q2 * l[2] + p.q3 * l[6] + p.q4 * l[7] + kI * p.kappa * l[8];
}

const Mat3& dh_es(Direction direction) {
  const auto& l = basis();
  switch (direction) {
    case Direction::q1: return l[1];
    case Direction::q2: return l[2];
    case Direction::q3: return l[6];
    case Direction::q4: return l[7];
  }
  throw std::invalid_argument("unknown direction");
}

double BerryLoopSpec::q3(double theta) const { return radius * std::sin(theta) + offset; }

double BerryLoopSpec::q_perp(double theta) const { return radius * std::cos(theta); }

double BerryLoopSpec::ring_ratio() const {
  return (offset - radius) / (kExceptionalRingRadius * kappa);
}

Mat3 build_h_berry(const BerryLoopSpec& spec, double theta) {
  const auto& l = basis();
  const double q3 = spec.q3(theta);
  const double q_perp = spec.q_perp(theta);
  return (spec.kappa / 3.0) * l[1] + q3 * l[6] +
         q_perp * (l[8] - Mat3::Identity() / kSqrt3) + kI * spec.kappa * l[8];
}

Mat2 build_h_twolevel(const TwoLevelParams& p, bool nonhermitian) {
  const double x = p.amplitude * std::sin(p.theta) * std::cos(p.phi);
  const double y = p.amplitude * std::sin(p.theta) * std::sin(p.phi);
  double z = p.amplitude * std::cos(p.theta);
  Mat2 h;
  h << z, cplx(x, -y), cplx(x, y), -z;
  if (nonhermitian) {
    h(0, 0) += kI * p.gamma;
    h(1, 1) -= kI * p.gamma;
  }
  return h;
}

TwoLevelParams TwoLevelLoopSpec::at(double theta) const {
  const double x = radius * std::sin(theta) + offset;
  const double z = radius * std::cos(theta);
  TwoLevelParams p;
  p.amplitude = std::hypot(x, z);
  p.theta = std::atan2(x, z);  // polar angle measured from +z, x-z plane
  p.phi = 0.0;
  p.gamma = gamma;
  return p;
}

SSH3Blocks ssh3_blocks(const SSH3Params& p) {
  SSH3Blocks b;
  b.onsite.setZero();
  b.forward.setZero();
  b.backward.setZero();
  if (p.model == SSH3Model::one) {
    // (t1 + w1 cos k) l1 + (w1 sin k + i g) l2 + (t2 + w2 cos k) l6 + (w2 sin k) l7
    b.onsite(0, 1) = p.t1 + p.gamma;
    b.onsite(1, 0) = p.t1 - p.gamma;
    b.onsite(1, 2) = p.t2;
    b.onsite(2, 1) = p.t2;
    b.forward(0, 1) = p.w1;
    b.forward(1, 2) = p.w2;
    b.backward(1, 0) = p.w1;
    b.backward(2, 1) = p.w2;
  } else {
    // (t1 + w1 cos k) l1 + (w1 sin k) l3 + t2 l6 - i g (l8 - I/sqrt3)
    b.onsite(0, 1) = b.onsite(1, 0) = p.t1;
    b.onsite(1, 2) = b.onsite(2, 1) = p.t2;
    b.onsite(2, 2) = kI * kSqrt3 * p.gamma;
    // w1 cos k -> w1/2 (e^{ik} + e^{-ik}); w1 sin k -> (i w1/2)(e^{-ik} - e^{ik})
    const cplx half = 0.5 * p.w1;
    const cplx ihalf = 0.5 * kI * p.w1;
    b.forward(0, 1) = b.forward(1, 0) = half;
    b.backward(0, 1) = b.backward(1, 0) = half;
    b.forward(0, 0) = ihalf;
    b.forward(1, 1) = -ihalf;
    b.backward(0, 0) = -ihalf;
    b.backward(1, 1) = ihalf;
  }
  return b;
}

Mat3 build_ssh3_bloch(const SSH3Params& p, double k) {
  const auto& l = basis();
  if (p.model == SSH3Model::one) {
    return (p.t1 + p.w1 * std::cos(k)) * l[1] +
           (p.w1 * std::sin(k) + kI * p.gamma) * l[2] +
           (p.t2 + p.w2 * std::cos(k)) * l[6] + (p.w2 * std::sin(k)) * l[7];
  }
  return (p.t1 + p.w1 * std::cos(k)) * l[1] + (p.w1 * std::sin(k)) * l[3] + p.t2 * l[6] -
         kI * p.gamma * (l[8] - Mat3::Identity() / kSqrt3);
}

MatX build_ssh3_chain(const SSH3Params& p) {
  if (p.cells < 2) {
    throw NumericalError(ErrorCode::invalid_argument,
                         "SSH3 chain needs at least 2 cells, got " + std::to_string(p.cells));
  }
  const auto b = ssh3_blocks(p);
  const int n = p.cells;
  MatX h = MatX::Zero(3 * n, 3 * n);
  for (int c = 0; c < n; ++c) {
    h.block<3, 3>(3 * c, 3 * c) = b.onsite;
    const bool wrap = c + 1 == n;
    if (wrap && p.bc == Boundary::open) continue;
    const int next = (c + 1) % n;
    h.block<3, 3>(3 * c, 3 * next) += b.forward;
    h.block<3, 3>(3 * next, 3 * c) += b.backward;
  }
  return h;
}

std::vector<double> ssh3_momenta(int cells) {
  std::vector<double> ks(static_cast<std::size_t>(cells));
  for (int n = 0; n < cells; ++n) ks[static_cast<std::size_t>(n)] = kTwoPi * n / cells;
  return ks;
}

}  // namespace esurf
