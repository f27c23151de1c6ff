#include "mating/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mating/error.hpp"

namespace mating {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr double kOnBeta = 1e-13;

// num/den of the map in the chart of x, before choosing the target chart.
void fraction(const MapSpec& m, const SpherePoint& x, cplx& num, cplx& den) {
  const cplx lt = m.lambda_theta(), ln = m.lambda_nu(), l = m.lambda();
  const cplx c = x.c;
  if (!x.at_inf_chart) {
    if (m.polynomial()) {
      num = (l + c) * c;
      den = 1.0;
    } else {
      num = (ln + c) * c;
      den = 1.0 + lt * c;
    }
  } else {
    if (m.polynomial()) {
      num = c * c;
      den = 1.0 + l * c;
    } else {
      num = c * (c + lt);
      den = 1.0 + ln * c;
    }
  }
}

}  // namespace

MapSpec MapSpec::siegel(const Theta& theta) {
  MapSpec m;
  m.kind_ = MapKind::SiegelQuad;
  m.theta_ = theta;
  m.lt_ = theta.multiplier();
  m.ln_ = 1.0;
  return m;
}

MapSpec MapSpec::para(const RotationNumber& nu) {
  MapSpec m;
  m.kind_ = MapKind::ParaQuad;
  m.nu_ = nu;
  m.ln_ = root_of_unity(nu);
  m.lt_ = 1.0;
  return m;
}

MapSpec MapSpec::mating(const Theta& theta, const RotationNumber& nu) {
  MapSpec m;
  m.kind_ = MapKind::MatingRational;
  m.theta_ = theta;
  m.nu_ = nu;
  m.lt_ = theta.multiplier();
  m.ln_ = root_of_unity(nu);
  return m;
}

const Theta& MapSpec::theta() const {
  if (!theta_) throw Error(Errc::Parse, "map " + str() + " has no theta");
  return *theta_;
}

std::string MapSpec::str() const {
  switch (kind_) {
    case MapKind::SiegelQuad: return "siegel(" + theta_->str() + ")";
    case MapKind::ParaQuad: return "para(" + nu_.str() + ")";
    case MapKind::MatingRational: return "mating(" + theta_->str() + "," + nu_.str() + ")";
  }
  return "?";
}

std::string kind_name(MapKind k) {
  switch (k) {
    case MapKind::SiegelQuad: return "siegel";
    case MapKind::ParaQuad: return "para";
    case MapKind::MatingRational: return "mating";
  }
  return "?";
}

cplx root_of_unity(const RotationNumber& nu) {
  const long double ang = 2 * kPiL * static_cast<long double>(nu.q) / static_cast<long double>(nu.p);
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

cplx eval(const MapSpec& m, cplx z) {
  cplx num, den;
  fraction(m, {false, z}, num, den);
  if (den == 0.0) return {INFINITY, 0.0};
  return num / den;
}

cplx eval_derivative(const MapSpec& m, cplx z) {
  if (m.polynomial()) return m.lambda() + 2.0 * z;
  const cplx lt = m.lambda_theta(), ln = m.lambda_nu();
  const cplx den = 1.0 + lt * z;
  return (lt * z * z + 2.0 * z + ln) / (den * den);
}

cplx eval_w(const MapSpec& m, cplx w) {
  cplx num, den;
  fraction(m, {true, w}, num, den);
  return num / den;
}

cplx eval_w_derivative(const MapSpec& m, cplx w) {
  if (m.polynomial()) {
    const cplx l = m.lambda(), den = 1.0 + l * w;
    return (2.0 * w + l * w * w) / (den * den);
  }
  const cplx lt = m.lambda_theta(), ln = m.lambda_nu();
  const cplx den = 1.0 + ln * w;
  return ((2.0 * w + lt) * den - ln * w * (w + lt)) / (den * den);
}

SpherePoint SpherePoint::from_z(cplx z) {
  if (std::abs(z) > 2) return {true, 1.0 / z};
  return {false, z};
}

cplx SpherePoint::z() const {
  if (!at_inf_chart) return c;
  if (c == 0.0) return {INFINITY, 0.0};
  return 1.0 / c;
}

SpherePoint step(const MapSpec& m, SpherePoint x) {
  cplx num, den;
  fraction(m, x, num, den);
  // The image is num/den in the source chart; land in the z chart iff |z| <= 2.
  if (!x.at_inf_chart) {
    if (std::abs(num) > 2 * std::abs(den)) return {true, den / num};
    return {false, num / den};
  }
  if (2 * std::abs(num) < std::abs(den)) return {true, num / den};
  return {false, den / num};
}

double spherical_derivative(const MapSpec& m, SpherePoint x) {
  const SpherePoint y = step(m, x);
  const cplx d = x.at_inf_chart ? eval_w_derivative(m, x.c) : eval_derivative(m, x.c);
  // |d| is taken in mixed charts; convert the target side when needed.
  const double ax = std::abs(x.c);
  if (x.at_inf_chart == y.at_inf_chart) {
    const double ay = std::abs(y.c);
    return std::abs(d) * (1 + ax * ax) / (1 + ay * ay);
  }
  // Source derivative is for the map into the source chart; y.c is in the
  // other chart, so f = 1/y.c and |f'| (1+|x|^2)/(1+|f|^2) = |f'| |y.c|^2 (1+|x|^2)/(1+|y.c|^2).
  const double ay = std::abs(y.c);
  return std::abs(d) * ay * ay * (1 + ax * ax) / (1 + ay * ay);
}

std::string fixed_type_name(FixedType t) {
  switch (t) {
    case FixedType::Attracting: return "attracting";
    case FixedType::Repelling: return "repelling";
    case FixedType::Parabolic: return "parabolic";
    case FixedType::Siegel: return "siegel";
  }
  return "?";
}

std::vector<FixedPoint> fixed_points(const MapSpec& m) {
  std::vector<FixedPoint> out;
  const cplx lt = m.lambda_theta(), ln = m.lambda_nu();
  auto by_modulus = [](cplx mult) {
    const double r = std::abs(mult);
    if (r < 1 - 1e-9) return FixedType::Attracting;
    if (r > 1 + 1e-9) return FixedType::Repelling;
    return FixedType::Parabolic;
  };
  switch (m.kind()) {
    case MapKind::SiegelQuad:
    case MapKind::ParaQuad: {
      const cplx l = m.lambda();
      out.push_back({SpherePoint::from_z(0.0), l,
                     m.kind() == MapKind::SiegelQuad ? FixedType::Siegel : FixedType::Parabolic, "0"});
      const cplx beta = 1.0 - l;
      const cplx mult = eval_derivative(m, beta);
      out.push_back({SpherePoint::from_z(beta), mult, by_modulus(mult), "beta"});
      out.push_back({SpherePoint::infinity(), 0.0, FixedType::Attracting, "inf"});
      break;
    }
    case MapKind::MatingRational: {
      out.push_back({SpherePoint::from_z(0.0), ln, FixedType::Parabolic, "0"});
      out.push_back({SpherePoint::infinity(), eval_w_derivative(m, 0.0), FixedType::Siegel, "inf"});
      const cplx beta = (1.0 - ln) / (1.0 - lt);
      const cplx mult = eval_derivative(m, beta);
      out.push_back({SpherePoint::from_z(beta), mult, by_modulus(mult), "beta"});
      break;
    }
  }
  return out;
}

std::string label_name(BasinClass::Label l) {
  switch (l) {
    case BasinClass::Label::ParabolicBasin: return "parabolic_basin";
    case BasinClass::Label::Undecided: return "undecided";
    case BasinClass::Label::SiegelSide: return "siegel_side";
  }
  return "?";
}

OrbitRecord orbit(const MapSpec& m, cplx z, std::size_t n, double escape_radius) {
  OrbitRecord rec;
  rec.start = z;
  rec.escape_radius = escape_radius;
  SpherePoint x = SpherePoint::from_z(z);
  rec.points.push_back(x);
  for (std::size_t k = 0; k < n; ++k) {
    if (escape_radius > 0 && x.abs_z() > escape_radius) {
      rec.stop = StopReason::Escaped;
      return rec;
    }
    x = step(m, x);
    rec.points.push_back(x);
  }
  if (escape_radius > 0 && x.abs_z() > escape_radius) rec.stop = StopReason::Escaped;
  return rec;
}

// --- mating model -----------------------------------------------------------

namespace {

cplx iterate_z(const MapSpec& m, cplx z, unsigned k) {
  for (unsigned i = 0; i < k; ++i) z = eval(m, z);
  return z;
}

}  // namespace

MatingModel::MatingModel(const MapSpec& m, const Options& opts) : map_(m) {
  if (m.kind() != MapKind::MatingRational) throw Error(Errc::Parse, "MatingModel needs a mating map");
  const unsigned p = m.nu().p;
  const HoloMap fp = [m, p](cplx z) { return iterate_z(m, z, p); };
  FitOptions fo;
  fo.max_radius = 0.25;
  germ_ = fit_germ(fp, 0.0, static_cast<int>(p), fo);
  beta_ = (1.0 - m.lambda_nu()) / (1.0 - m.lambda_theta());
  dirs_ = attracting_vectors(germ_);
  const std::size_t np = dirs_.size();
  half_angle_ = kPi / (4.0 * germ_.p);

  // Cone radius: largest rho whose cones F^p maps into themselves.
  auto cones_invariant = [&](double rho) {
    static constexpr double radii[] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.1, 0.05, 0.01};
    for (std::size_t j = 0; j < np; ++j) {
      const cplx u = dirs_[j] / std::abs(dirs_[j]);
      for (double fr : radii) {
        for (int a = -4; a <= 4; ++a) {
          const cplx z = rho * fr * u * std::polar(1.0, 0.999 * half_angle_ * a / 4.0);
          const cplx w = fp(z);
          if (!(std::abs(w) <= std::abs(z) * (1 + 1e-12))) return false;
          if (!(std::abs(std::arg(w / dirs_[j])) < half_angle_)) return false;
        }
      }
    }
    return true;
  };
  double lo = 1e-2, hi = 1.0;
  if (!cones_invariant(lo)) throw Error(Errc::NotParabolic, "no invariant petal cone at 0");
  if (cones_invariant(hi)) lo = hi;
  for (int it = 0; it < 40 && hi - lo > 1e-4 * lo; ++it) {
    const double mid = std::sqrt(lo * hi);
    (cones_invariant(mid) ? lo : hi) = mid;
  }
  rho_ = lo;

  // F carries the cone of v_j to the cone nearest lambda_nu v_j.
  std::vector<std::size_t> next(np);
  for (std::size_t j = 0; j < np; ++j) {
    const cplx target = m.lambda_nu() * dirs_[j];
    std::size_t best = 0;
    for (std::size_t k = 1; k < np; ++k)
      if (std::abs(dirs_[k] - target) < std::abs(dirs_[best] - target)) best = k;
    next[j] = best;
  }
  labels_.assign(np, -1);
  {
    std::size_t j = 0;
    for (std::size_t k = 0; k < np; ++k) {
      if (labels_[j] >= 0) throw Error(Errc::Inconsistent, "petal cones are not permuted cyclically");
      labels_[j] = static_cast<int>((np - k % np) % np);
      j = next[j];
    }
  }

  // Siegel disk at infinity: largest r whose circle orbits stay in |w| < 2r.
  auto disk_stable = [&](double r, const std::vector<cplx>& starts) {
    for (cplx w0 : starts) {
      cplx w = w0;
      for (std::size_t k = 0; k < opts.siegel_iterates; ++k) {
        w = eval_w(m, w);
        if (!(std::abs(w) < 2 * r)) return false;
      }
    }
    return true;
  };
  auto circle = [&](double r) {
    std::vector<cplx> s;
    for (std::size_t k = 0; k < opts.siegel_samples; ++k) s.push_back(std::polar(0.999 * r, 2 * kPi * k / opts.siegel_samples));
    return s;
  };
  double slo = 1e-4, shi = 1.0;
  if (disk_stable(shi, circle(shi))) slo = shi;
  for (int it = 0; it < 30 && shi - slo > 1e-3 * slo; ++it) {
    const double mid = std::sqrt(slo * shi);
    (disk_stable(mid, circle(mid)) ? slo : shi) = mid;
  }
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<cplx> inside;
    for (std::size_t k = 0; k < opts.siegel_samples; ++k)
      inside.push_back(std::polar(slo * std::sqrt(unif(rng)), 2 * kPi * unif(rng)));
    if (disk_stable(slo, inside)) break;
    slo *= 0.9;
  }
  r0_ = slo;

  // Critical points: roots of lambda_theta z^2 + 2 z + lambda_nu.
  const cplx lt = m.lambda_theta(), ln = m.lambda_nu();
  const cplx disc = std::sqrt(1.0 - lt * ln);
  const cplx c1 = (-1.0 + disc) / lt, c2 = (-1.0 - disc) / lt;
  const BasinClass k1 = classify_raw(SpherePoint::from_z(c1), opts.label_budget);
  const BasinClass k2 = classify_raw(SpherePoint::from_z(c2), opts.label_budget);
  const bool b1 = k1.label == BasinClass::Label::ParabolicBasin;
  const bool b2 = k2.label == BasinClass::Label::ParabolicBasin;
  if (b1 == b2) throw Error(Errc::LabelingUndecided, "critical orbits not separated within the budget");
  const BasinClass& kc0 = b1 ? k1 : k2;
  c0_ = SpherePoint::from_z(b1 ? c1 : c2);
  cinf_ = SpherePoint::from_z(b1 ? c2 : c1);
  c0_step_ = kc0.step;
  // Normalize so that c0 lies in U^(0).
  const int shift = kc0.basin;
  for (int& l : labels_) l = (l - shift + static_cast<int>(np)) % static_cast<int>(np);
}

int MatingModel::cone_of(cplx z) const {
  const double r = std::abs(z);
  if (!(r > 0) || !(r < rho_)) return -1;
  for (std::size_t j = 0; j < dirs_.size(); ++j)
    if (std::abs(std::arg(z / dirs_[j])) < half_angle_) return static_cast<int>(j);
  return -1;
}

BasinClass MatingModel::classify_raw(SpherePoint x, std::size_t budget) const {
  const int np = static_cast<int>(dirs_.size());
  for (std::size_t n = 0;; ++n) {
    if (x.abs_w() < r0_) return {BasinClass::Label::SiegelSide, -1, n};
    if (!x.at_inf_chart) {
      const int j = cone_of(x.c);
      if (j >= 0) return {BasinClass::Label::ParabolicBasin, static_cast<int>((labels_[j] + n) % np), n};
      // On the repelling fixed point the rest of the orbit is amplified
      // rounding error.
      if (std::abs(x.c - beta_) < kOnBeta * std::abs(beta_)) break;
    }
    if (n == budget) break;
    x = step(map_, x);
  }
  return {};
}

BasinClass MatingModel::classify(SpherePoint x, std::size_t budget) const { return classify_raw(x, budget); }

std::vector<CriticalPoint> critical_points(const MapSpec& m) {
  if (m.polynomial()) return {{SpherePoint::from_z(-m.lambda() / 2.0), "c"}, {SpherePoint::infinity(), "inf"}};
  const MatingModel model(m);
  return {{model.c0(), "c0"}, {model.cinf(), "cinf"}};
}

OrbitRecord orbit(const MatingModel& model, cplx z, std::size_t n) {
  OrbitRecord rec;
  rec.start = z;
  SpherePoint x = SpherePoint::from_z(z);
  for (std::size_t k = 0;; ++k) {
    rec.points.push_back(x);
    if (!x.at_inf_chart) {
      const int j = model.cone_of(x.c);
      if (j >= 0) {
        rec.stop = StopReason::EnteredPetal;
        rec.petal = j;
        rec.petal_step = k;
        return rec;
      }
    }
    if (k == n) break;
    x = step(model.map(), x);
  }
  return rec;
}

}  // namespace mating
