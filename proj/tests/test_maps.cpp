#include <cmath>
#include <random>

#include "doctest.h"
#include "mating/error.hpp"
#include "mating/maps.hpp"

using namespace mating;

namespace {

const cplx kI(0, 1);

cplx expi(double t) { return std::polar(1.0, 2 * M_PI * t); }

const MapSpec kMating = MapSpec::mating(Theta::golden(), RotationNumber(3, 5));

// The model is costly to build; share one per process.
const MatingModel& model35() {
  static const MatingModel m(kMating);
  return m;
}

// F written out directly from its formula, independent of maps.cpp.
cplx mating_formula(cplx z, double theta, double nu) { return (expi(nu) * z + z * z) / (1.0 + expi(theta) * z); }

const double kGolden = (std::sqrt(5.0) - 1) / 2;

}  // namespace

TEST_CASE("evaluation matches the defining formulas") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  auto siegel = MapSpec::siegel(Theta::golden());
  auto para = MapSpec::para(RotationNumber(3, 5));
  for (int k = 0; k < 200; ++k) {
    cplx z(u(rng), u(rng));
    CHECK(std::abs(eval(siegel, z) - (expi(kGolden) * z + z * z)) < 1e-12 * (1 + std::norm(z)));
    CHECK(std::abs(eval(para, z) - (expi(0.6) * z + z * z)) < 1e-12 * (1 + std::norm(z)));
    if (std::abs(1.0 + expi(kGolden) * z) > 1e-3)
      CHECK(std::abs(eval(kMating, z) - mating_formula(z, kGolden, 0.6)) < 1e-10 * (1 + std::abs(eval(kMating, z))));
  }
  CHECK(eval(para, 0.0) == 0.0);
  CHECK(eval(kMating, 0.0) == 0.0);
  // The pole goes to infinity.
  CHECK(std::isinf(std::abs(eval(kMating, -1.0 / expi(kGolden)))));
}

TEST_CASE("derivatives agree with central differences on 1000 points") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  const cplx pole = -1.0 / kMating.lambda_theta();
  for (const MapSpec& m : {MapSpec::siegel(Theta::golden()), MapSpec::para(RotationNumber(3, 5)), kMating}) {
    int tested = 0;
    while (tested < 1000) {
      cplx z(u(rng), u(rng));
      if (!m.polynomial() && std::abs(z - pole) < 0.2) continue;
      const double h = 1e-5;
      cplx fd = (eval(m, z + h) - eval(m, z - h)) / (2 * h);
      cplx d = eval_derivative(m, z);
      CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)));
      ++tested;
    }
  }
}

TEST_CASE("chart at infinity") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int k = 0; k < 200; ++k) {
    cplx w(u(rng), u(rng));
    if (std::abs(w) < 1e-3) continue;
    CHECK(std::abs(eval_w(kMating, w) - 1.0 / eval(kMating, 1.0 / w)) < 1e-12);
    const double h = 1e-6;
    cplx fd = (eval_w(kMating, w + h) - eval_w(kMating, w - h)) / (2 * h);
    CHECK(std::abs(fd - eval_w_derivative(kMating, w)) < 1e-6);
  }
  // Near infinity, w -> 1/F(1/w) rotates by e^{+2 pi i theta}.
  for (double r : {1e-3, 1e-5, 1e-7}) {
    cplx w = r;
    cplx ratio = eval_w(kMating, w) / w;
    CHECK(std::abs(std::abs(ratio) - 1.0) < 10 * r);
    CHECK(std::abs(std::remainder(std::arg(ratio) - 2 * M_PI * kGolden, 2 * M_PI)) < 10 * r);
  }
  CHECK(eval_w(kMating, 0.0) == 0.0);
}

TEST_CASE("sphere stepping switches charts") {
  SpherePoint x = SpherePoint::from_z(10.0);
  CHECK(x.at_inf_chart);
  CHECK(std::abs(x.z() - 10.0) < 1e-12);
  SpherePoint y = step(kMating, SpherePoint::from_z(0.5));
  CHECK(std::abs(y.z() - eval(kMating, 0.5)) < 1e-12);
  SpherePoint inf = step(kMating, SpherePoint::infinity());
  CHECK(inf.at_inf_chart);
  CHECK(inf.c == 0.0);
}

TEST_CASE("fixed points of the polynomials") {
  auto para = MapSpec::para(RotationNumber(3, 5));
  auto fp = fixed_points(para);
  bool parabolic = false, repelling = false;
  for (auto& f : fp) {
    if (f.location.at_inf_chart) continue;
    cplx z = f.location.z();
    if (std::abs(z) < 1e-14) {
      CHECK(f.type == FixedType::Parabolic);
      CHECK(std::abs(f.multiplier - expi(0.6)) < 1e-14);
      parabolic = true;
    } else {
      CHECK(std::abs(z - (1.0 - expi(0.6))) < 1e-14);
      CHECK(f.type == FixedType::Repelling);
      repelling = true;
    }
  }
  CHECK(parabolic);
  CHECK(repelling);

  auto siegel = MapSpec::siegel(Theta::golden());
  for (auto& f : fixed_points(siegel)) {
    if (f.location.at_inf_chart || std::abs(f.location.z()) < 1e-14) continue;
    CHECK(std::abs(f.location.z() - (1.0 - expi(kGolden))) < 1e-14);
    CHECK(std::abs(f.multiplier) == doctest::Approx(std::abs(2.0 - expi(kGolden))).epsilon(1e-12));
    CHECK(f.type == FixedType::Repelling);
  }
}

TEST_CASE("fixed points of the mating") {
  const cplx beta = (1.0 - expi(0.6)) / (1.0 - expi(kGolden));
  // Closed form agrees with solving F(z) = z directly: z (z + l_nu - 1 - l_theta z) = 0.
  CHECK(std::abs(mating_formula(beta, kGolden, 0.6) - beta) < 1e-12);
  int seen = 0;
  for (auto& f : fixed_points(kMating)) {
    if (f.location.at_inf_chart && f.location.c == 0.0) {
      CHECK(f.type == FixedType::Siegel);
      CHECK(std::abs(f.multiplier - expi(kGolden)) < 1e-14);
      ++seen;
    } else if (std::abs(f.location.z()) < 1e-14) {
      CHECK(f.type == FixedType::Parabolic);
      CHECK(std::abs(f.multiplier - expi(0.6)) < 1e-14);
      ++seen;
    } else {
      CHECK(std::abs(f.location.z() - beta) < 1e-12);
      CHECK(std::abs(eval(kMating, beta) - beta) < 1e-12);
      CHECK(std::abs(f.multiplier) > 1);
      CHECK(f.type == FixedType::Repelling);
      ++seen;
    }
  }
  CHECK(seen == 3);
}

TEST_CASE("critical points") {
  auto siegel = MapSpec::siegel(Theta::golden());
  auto cs = critical_points(siegel);
  REQUIRE(cs.size() == 2);
  CHECK(std::abs(cs[0].location.z() + expi(kGolden) / 2.0) < 1e-15);
  CHECK(std::abs(eval_derivative(siegel, cs[0].location.z())) < 1e-14);

  auto cm = critical_points(kMating);
  REQUIRE(cm.size() == 2);
  // Roots of e^{2 pi i theta} z^2 + 2 z + e^{2 pi i nu} by the quadratic formula.
  const cplx A = expi(kGolden), C = expi(0.6);
  const cplx disc = std::sqrt(4.0 - 4.0 * A * C);
  const cplx r1 = (-2.0 + disc) / (2.0 * A), r2 = (-2.0 - disc) / (2.0 * A);
  for (auto& c : cm) {
    cplx z = c.location.z();
    CHECK(std::min(std::abs(z - r1), std::abs(z - r2)) < 1e-12);
    CHECK(std::abs(eval_derivative(kMating, z)) < 1e-10);
  }
  CHECK(cm[0].name == "c0");
  CHECK(cm[1].name == "cinf");
  // c0 enters a petal, cinf does not.
  auto o0 = orbit(model35(), cm[0].location.z(), 100000);
  CHECK(o0.stop == StopReason::EnteredPetal);
  auto oi = orbit(model35(), cm[1].location.z(), 100000);
  CHECK(oi.stop != StopReason::EnteredPetal);
}

TEST_CASE("orbits") {
  auto f0 = MapSpec::para(RotationNumber(0, 1));
  auto o = orbit(f0, -0.5, 3);
  REQUIRE(o.points.size() == 4);
  const double want[] = {-0.5, -0.25, -0.1875, -0.15234375};
  for (int k = 0; k < 4; ++k) CHECK(o.points[k].z() == cplx(want[k]));
  auto esc = orbit(f0, 2.0, 100, 1e6);
  CHECK(esc.stop == StopReason::Escaped);
  CHECK(esc.points.size() < 10);
  CHECK(std::abs(esc.points.back().z()) > 1e6);
  auto para = MapSpec::para(RotationNumber(3, 5));
  for (auto& x : orbit(para, 0.0, 10).points) CHECK(x.z() == 0.0);
  // Consecutive points follow the map.
  auto m = orbit(kMating, cplx(0.3, 0.2), 50);
  for (std::size_t k = 0; k + 1 < m.points.size(); ++k) {
    SpherePoint next = step(kMating, m.points[k]);
    CHECK(std::abs(next.z() - m.points[k + 1].z()) <= 1e-12 * std::max(1.0, std::abs(next.z())));
  }
}

TEST_CASE("classification examples") {
  const auto& model = model35();
  CHECK(model.directions().size() == 5);
  CHECK(classify_point(model, model.c0().z(), 100000).label == BasinClass::Label::ParabolicBasin);
  CHECK(model.classify(SpherePoint::infinity(), 10).label == BasinClass::Label::SiegelSide);
  const cplx beta = (1.0 - expi(0.6)) / (1.0 - expi(kGolden));
  for (std::size_t b : {1000u, 10000u, 100000u})
    CHECK(model.classify(beta, b).label == BasinClass::Label::Undecided);
  CHECK(model.classify(0.0, 100).label == BasinClass::Label::Undecided);
}

TEST_CASE("basin labels follow F(U_i) = U_{i-1}") {
  const auto& model = model35();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int checked = 0;
  for (int k = 0; k < 3000; ++k) {
    cplx z(u(rng), u(rng));
    auto a = model.classify(z, 20000);
    if (a.label != BasinClass::Label::ParabolicBasin || a.step == 0) continue;
    auto b = model.classify(eval(kMating, z), 20000);
    REQUIRE(b.label == BasinClass::Label::ParabolicBasin);
    CHECK(b.basin == (a.basin + 4) % 5);
    CHECK(b.step + 1 == a.step);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("labels are stable when the budget doubles") {
  const auto& model = model35();
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-3, 3);
  int flips = 0, resolved = 0;
  for (int k = 0; k < 2000; ++k) {
    cplx z(u(rng), u(rng));
    auto a = model.classify(z, 2000), b = model.classify(z, 4000);
    if (a.label != BasinClass::Label::Undecided) {
      ++resolved;
      if (a.label != b.label || a.basin != b.basin) ++flips;
    }
  }
  CHECK(flips == 0);
  CHECK(resolved > 1500);
}

TEST_CASE("bounded type verdicts") {
  CHECK(is_bounded_type(Theta::golden(), 1, 10).bounded);
  auto v = is_bounded_type(Theta::sqrt2m1(), 2, 10);
  CHECK(v.bounded);
  CHECK(v.max_quotient == 2);
  CHECK_THROWS_AS(Theta::parse("22/7"), Error);
}
