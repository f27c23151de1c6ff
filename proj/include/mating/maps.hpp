#pragma once

// The Siegel quadratic, the parabolic quadratic and their mating model
//   F(z) = (e^{2 pi i nu} z + z^2) / (1 + e^{2 pi i theta} z).

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mating/circle.hpp"
#include "mating/parabolic_local.hpp"
#include "mating/theta.hpp"

namespace mating {

enum class MapKind { SiegelQuad, ParaQuad, MatingRational };

class MapSpec {
public:
  static MapSpec siegel(const Theta& theta);
  static MapSpec para(const RotationNumber& nu);
  static MapSpec mating(const Theta& theta, const RotationNumber& nu);

  MapKind kind() const { return kind_; }
  bool polynomial() const { return kind_ != MapKind::MatingRational; }
  const Theta& theta() const;
  const RotationNumber& nu() const { return nu_; }
  cplx lambda_theta() const { return lt_; }
  cplx lambda_nu() const { return ln_; }
  // Multiplier of the finite indifferent fixed point (0).
  cplx lambda() const { return kind_ == MapKind::SiegelQuad ? lt_ : ln_; }

  std::string str() const;

  friend bool operator==(const MapSpec& a, const MapSpec& b) {
    return a.kind_ == b.kind_ && a.theta_ == b.theta_ && a.nu_ == b.nu_;
  }

private:
  MapKind kind_ = MapKind::ParaQuad;
  std::optional<Theta> theta_;
  RotationNumber nu_;
  cplx lt_, ln_;
};

std::string kind_name(MapKind k);

// e^{2 pi i q/p} from extended precision.
cplx root_of_unity(const RotationNumber& nu);

// Finite chart. The pole of F maps to infinity (returns inf).
cplx eval(const MapSpec& m, cplx z);
cplx eval_derivative(const MapSpec& m, cplx z);
// Chart at infinity, w = 1/z: returns 1/f(1/w).
cplx eval_w(const MapSpec& m, cplx w);
cplx eval_w_derivative(const MapSpec& m, cplx w);

// A point of the Riemann sphere in whichever chart keeps it bounded.
struct SpherePoint {
  bool at_inf_chart = false;
  cplx c;

  static SpherePoint from_z(cplx z);
  static SpherePoint infinity() { return {true, 0.0}; }
  cplx z() const;
  // Spherical distance to 0 is small iff |z| small; to infinity iff |w| small.
  double abs_z() const { return at_inf_chart ? 1.0 / std::abs(c) : std::abs(c); }
  double abs_w() const { return at_inf_chart ? std::abs(c) : 1.0 / std::abs(c); }
};

// One application of the map with the chart switched at |z| = 2.
SpherePoint step(const MapSpec& m, SpherePoint x);
// Spherical derivative |f'(z)| (1 + |z|^2) / (1 + |f(z)|^2).
double spherical_derivative(const MapSpec& m, SpherePoint x);

enum class FixedType { Attracting, Repelling, Parabolic, Siegel };
std::string fixed_type_name(FixedType t);

struct FixedPoint {
  SpherePoint location;
  cplx multiplier;
  FixedType type;
  std::string name;
};

std::vector<FixedPoint> fixed_points(const MapSpec& m);

struct CriticalPoint {
  SpherePoint location;
  std::string name;  // "c" / "inf" for polynomials, "c0" / "cinf" for F
};

enum class StopReason { BudgetExhausted, Escaped, EnteredPetal };

struct OrbitRecord {
  cplx start;
  std::vector<SpherePoint> points;
  StopReason stop = StopReason::BudgetExhausted;
  double escape_radius = 0;
  int petal = -1;
  std::size_t petal_step = 0;
};

// Stops early once |z| > escape_radius (0 disables).
OrbitRecord orbit(const MapSpec& m, cplx z, std::size_t n, double escape_radius = 0);

struct BasinClass {
  enum class Label { ParabolicBasin, Undecided, SiegelSide };
  Label label = Label::Undecided;
  int basin = -1;         // i in 0..p-1 with F(U^(i)) = U^(i-1)
  std::size_t step = 0;   // entry step into a petal or into the Siegel disk

  friend bool operator==(const BasinClass&, const BasinClass&) = default;
};

std::string label_name(BasinClass::Label l);

// Precomputed local data for F: petal cones at 0 and a certified disk at
// infinity. Built once per MapSpec and then read-only.
class MatingModel {
public:
  struct Options {
    std::size_t label_budget = 100000;
    std::size_t siegel_samples = 256;
    std::size_t siegel_iterates = 4000;
  };

  explicit MatingModel(const MapSpec& m) : MatingModel(m, Options()) {}
  MatingModel(const MapSpec& m, const Options& opts);

  const MapSpec& map() const { return map_; }
  const ParabolicGerm& germ() const { return germ_; }
  // Attracting directions of F^p at 0, sorted by argument.
  const std::vector<cplx>& directions() const { return dirs_; }
  // Cone |arg(z/v)| < cone_half_angle, 0 < |z| < cone_radius.
  double cone_radius() const { return rho_; }
  double cone_half_angle() const { return half_angle_; }
  // |w| < siegel_radius is treated as inside the Siegel disk at infinity.
  double siegel_radius() const { return r0_; }
  SpherePoint c0() const { return c0_; }
  SpherePoint cinf() const { return cinf_; }
  std::size_t c0_entry_step() const { return c0_step_; }

  // Index of the cone containing z, or -1.
  int cone_of(cplx z) const;
  // Basin label of cone j.
  int cone_label(int j) const { return labels_[static_cast<std::size_t>(j)]; }

  BasinClass classify(SpherePoint x, std::size_t budget) const;
  BasinClass classify(cplx z, std::size_t budget) const { return classify(SpherePoint::from_z(z), budget); }

private:
  BasinClass classify_raw(SpherePoint x, std::size_t budget) const;

  MapSpec map_;
  ParabolicGerm germ_;
  std::vector<cplx> dirs_;
  std::vector<int> labels_;
  double rho_ = 0;
  double half_angle_ = 0;
  double r0_ = 0;
  SpherePoint c0_, cinf_;
  std::size_t c0_step_ = 0;
  cplx beta_;
};

inline BasinClass classify_point(const MatingModel& model, cplx z, std::size_t budget) {
  return model.classify(z, budget);
}

// For F this builds a MatingModel to tell c0 from cinf (LabelingUndecided if
// the budget does not separate them).
std::vector<CriticalPoint> critical_points(const MapSpec& m);

// Orbit of F that stops when it enters a petal cone.
OrbitRecord orbit(const MatingModel& model, cplx z, std::size_t n);

}  // namespace mating
