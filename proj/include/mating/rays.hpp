#pragma once

// External rays of f(z) = lambda z + z^2 by potential continuation, landing
// points, and the external angle of the critical value of the Siegel map.

#include <optional>
#include <string>
#include <vector>

#include "mating/circle.hpp"
#include "mating/maps.hpp"

namespace mating {

// A point of the circle that is either an exact rational or a finite bit
// string (an irrational angle known to bits.size() binary places).
class RayAngle {
public:
  RayAngle(const Angle& t) : exact_(t) {}
  static RayAngle from_bits(std::string bits);

  bool is_exact() const { return exact_.has_value(); }
  const Angle& exact() const { return *exact_; }
  const std::string& bits() const { return bits_; }
  // Number of trusted binary places (unbounded for exact angles).
  std::size_t precision() const;

  // frac(2^n t) as a double. Throws InsufficientResolution when fewer than
  // 24 known bits follow position n.
  double doubled_value(std::size_t n) const;
  std::string str() const;

private:
  RayAngle() = default;
  std::optional<Angle> exact_;
  std::string bits_;
};

struct RayOptions {
  double start_radius = 65536.0;
  double min_potential = 1e-8;
  int steps_per_halving = 16;
  double land_tol = 1e-3;
  int max_newton = 64;
  int max_retries = 24;
  // Refine landings of rational angles whose period is at most this.
  std::size_t refine_max_period = 64;
};

struct RaySample {
  double potential;
  cplx z;
};

struct RayTrace {
  RayAngle angle;
  std::vector<RaySample> samples;
  std::optional<cplx> landing;
  bool converged = false;
  // |z_end - z_(one halving earlier)|.
  double tail = 0;
  // Set when the landing was refined to a (pre)periodic point.
  bool refined = false;
};

RayTrace trace_ray(const MapSpec& poly, const RayAngle& t, const RayOptions& opts = {});

cplx landing_point(const RayTrace& r);

// eta(t): the landing point, NotConverged otherwise.
cplx caratheodory_sample(const MapSpec& poly, const Angle& t, const RayOptions& opts = {});

struct FlowAngle {
  std::string bits;  // binary digits of the angle
  double value = 0;
  double potential = 0;  // potential of the start point
};

// External angle of a point outside the filled Julia set, read off by
// following its field line out to |z| = start_radius. Throws FlowTrapped.
FlowAngle flow_angle(const MapSpec& poly, cplx z0, const RayOptions& opts = {});

struct OmegaOptions {
  double offset = 1e-2;
  int runs = 3;           // offsets offset, offset/4, ...
  double max_err = 1e-3;
  std::size_t escape_budget = 20000;
  int directions = 4096;  // start points scanned on each offset circle
};

struct OmegaEstimate {
  RayAngle angle = Angle();
  double value = 0;
  // |angle - omega| bound from agreement of runs at shrinking offsets.
  double error = 1;
  std::size_t trusted_bits = 0;
  std::vector<double> run_values;
};

// External angle of the critical value -lambda^2/4 of f_theta.
OmegaEstimate critical_value_angle(const MapSpec& poly, const OmegaOptions& opts = {});
// The same procedure started near an arbitrary point of J.
OmegaEstimate point_angle(const MapSpec& poly, cplx target, const OmegaOptions& opts = {});

}  // namespace mating
