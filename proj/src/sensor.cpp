#include "cagecap/sensor.hpp"

#include <algorithm>
#include <cmath>

#include "cagecap/errors.hpp"

namespace cagecap {

SensorModel SensorModel::sphere(double r_s) {
  SensorModel m{SensorKind::Sphere, r_s, 0.0};
  m.validate();
  return m;
}

SensorModel SensorModel::cone(double r_s, double h) {
  SensorModel m{SensorKind::Cone, r_s, h};
  m.validate();
  return m;
}

void SensorModel::validate() const {
  if (!(r_s > 0.0) || !std::isfinite(r_s)) throw ParameterError("sensor radius must be positive");
  if (!(h >= 0.0) || !std::isfinite(h)) throw ParameterError("cone height must be non-negative");
  if ((h == 0.0) != (kind == SensorKind::Sphere)) {
    throw ParameterError("cone sensors need h > 0 and sphere sensors h = 0");
  }
}

bool in_sensor_volume(const AuvPose& pose, const Vec3& point) {
  const Vec3 rel = point - pose.position;
  const double r_s = pose.sensor.r_s;
  if (pose.sensor.kind == SensorKind::Sphere) {
    return rel.squared_norm() <= r_s * r_s * (1.0 + 1e-12);
  }
  const double h = pose.sensor.h;
  const double along = rel.dot(pose.axis);
  const double tol = 1e-9 * h;
  if (along < -tol || along > h + tol) return false;
  const double radial2 = std::max(0.0, rel.squared_norm() - along * along);
  const double allowed = r_s * std::clamp(along, 0.0, h) / h;
  return std::sqrt(radial2) <= allowed + 1e-9 * r_s;
}

}  // namespace cagecap
