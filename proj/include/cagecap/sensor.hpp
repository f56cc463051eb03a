#pragma once

#include "cagecap/geometry.hpp"

namespace cagecap {

enum class SensorKind { Sphere, Cone };

// Either a ball of radius r_s around the vehicle, or a cone whose apex is the
// vehicle and whose base disc of radius r_s lies a distance h along the axis.
struct SensorModel {
  SensorKind kind = SensorKind::Sphere;
  double r_s = 1.0;
  double h = 0.0;

  static SensorModel sphere(double r_s);
  static SensorModel cone(double r_s, double h);
  void validate() const;
};

struct AuvPose {
  Vec3 position;
  Vec3 axis{0.0, 0.0, -1.0};  // unit sensor axis, stands in for the full attitude
  SensorModel sensor;

  // Centre of the sensing disc used to build cages.
  Vec3 disc_center() const { return position + sensor.h * axis; }
};

// Closed sensor volume membership.
bool in_sensor_volume(const AuvPose& pose, const Vec3& point);

}  // namespace cagecap
