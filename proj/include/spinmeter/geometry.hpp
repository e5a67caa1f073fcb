#pragma once

#include <cmath>
#include <stdexcept>

#include "spinmeter/linalg.hpp"

namespace spinmeter {

// Point on the unit 2-sphere.  Construction normalizes the components, so
// the unit-norm invariant holds to machine precision by construction.
class UnitVector {
 public:
  UnitVector(double x, double y, double z) : v_(x, y, z) {
    const double n = v_.norm();
    if (!(n > 1e-12)) throw std::invalid_argument("UnitVector: direction too close to zero");
    v_ /= n;
  }

  static UnitVector polar(double theta, double phi) {
    return UnitVector(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                      std::cos(theta));
  }

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  double dot(const UnitVector& o) const { return v_.dot(o.v_); }

  double theta() const { return std::acos(std::clamp(v_.z(), -1.0, 1.0)); }
  double phi() const { return std::atan2(v_.y(), v_.x()); }

 private:
  Vec3 v_;
};

inline UnitVector unit_x() { return UnitVector(1.0, 0.0, 0.0); }
inline UnitVector unit_y() { return UnitVector(0.0, 1.0, 0.0); }
inline UnitVector unit_z() { return UnitVector(0.0, 0.0, 1.0); }

}  // namespace spinmeter
