#include "qphase/core.hpp"

#include <cmath>
#include <string>

namespace qphase {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

void require_finite(Complex z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

namespace {

// into [0, 2pi)
double normalize_angle(double phi) {
  const double two_pi = 2.0 * M_PI;
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;  // fmod rounding can land exactly on 2pi
  return w;
}

}  // namespace

SqueezeParam::SqueezeParam(double r_, double phi_) {
  require_finite(r_, "squeeze magnitude r");
  require_finite(phi_, "squeeze angle phi");
  if (r_ < 0.0) {
    throw std::domain_error("negative squeeze magnitude (absorb the sign into phi)");
  }
  r = r_;
  phi = normalize_angle(phi_);
}

ThermalParam::ThermalParam(double n_bar_) {
  require_finite(n_bar_, "thermal occupation n_bar");
  if (n_bar_ < 0.0) {
    throw std::domain_error("negative thermal occupation");
  }
  n_bar = n_bar_;
}

ThermalParam ThermalParam::from_theta(double theta) {
  return ThermalParam(nbar_from_theta(theta));
}

double ThermalParam::theta() const {
  if (n_bar == 0.0) {
    throw std::domain_error("infinite theta (vacuum limit)");
  }
  return std::log1p(1.0 / n_bar);
}

StateParams::StateParams(ComplexAmplitude alpha_, SqueezeParam squeeze_, ThermalParam thermal_)
    : alpha(alpha_), squeeze(squeeze_), thermal(thermal_) {
  require_finite(alpha_, "displacement alpha");
}

OrderingParam::OrderingParam(double p_) {
  require_finite(p_, "ordering parameter p");
  p = p_;
}

double nbar_from_theta(double theta) {
  require_finite(theta, "theta");
  if (theta <= 0.0) {
    throw std::domain_error("non-positive inverse temperature product");
  }
  return 1.0 / std::expm1(theta);
}

double theta_from_nbar(double n_bar) {
  require_finite(n_bar, "n_bar");
  if (n_bar < 0.0) {
    throw std::domain_error("negative thermal occupation");
  }
  if (n_bar == 0.0) {
    throw std::domain_error("infinite theta (vacuum limit)");
  }
  return std::log1p(1.0 / n_bar);
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

PhaseSpaceGrid::PhaseSpaceGrid(ComplexAmplitude center_, double half_extent_re_,
                               double half_extent_im_, int n_re_, int n_im_) {
  require_finite(center_, "grid center");
  require_finite(half_extent_re_, "grid half extent (re)");
  require_finite(half_extent_im_, "grid half extent (im)");
  if (half_extent_re_ <= 0.0 || half_extent_im_ <= 0.0) {
    throw std::domain_error("grid half extents must be positive");
  }
  if (!power_of_two(n_re_) || !power_of_two(n_im_) || n_re_ < 8 || n_im_ < 8) {
    throw std::domain_error("grid sample counts must be powers of two, at least 8");
  }
  center = center_;
  half_extent_re = half_extent_re_;
  half_extent_im = half_extent_im_;
  n_re = n_re_;
  n_im = n_im_;
}

}  // namespace qphase
