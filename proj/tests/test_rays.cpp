#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "mating/error.hpp"
#include "mating/rays.hpp"

using namespace mating;

namespace {

cplx expi(double t) { return std::polar(1.0, 2 * M_PI * t); }

const double kGolden = (std::sqrt(5.0) - 1) / 2;
const MapSpec kPara35 = MapSpec::para(RotationNumber(3, 5));
const MapSpec kSiegel = MapSpec::siegel(Theta::golden());

Angle random_odd_angle(std::mt19937_64& rng) {
  // Odd denominators up to 2^12.
  long den = 3 + 2 * static_cast<long>(rng() % 2047);
  return Angle(1 + static_cast<long>(rng() % (den - 1)), den);
}

}  // namespace

TEST_CASE("ray angles") {
  RayAngle a(Angle(11, 31));
  CHECK(a.is_exact());
  CHECK(a.doubled_value(1) == doctest::Approx(22.0 / 31));
  CHECK(a.str() == "11/31");
  RayAngle b = RayAngle::from_bits(std::string(40, '0') + "1");
  CHECK_FALSE(b.is_exact());
  CHECK(b.precision() == 41);
  CHECK(b.doubled_value(0) == doctest::Approx(std::ldexp(1.0, -41)));
  try {
    b.doubled_value(20);
    FAIL("expected InsufficientResolution");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientResolution);
  }
}

TEST_CASE("rays to the beta fixed points") {
  auto r = trace_ray(kPara35, Angle(0, 1));
  REQUIRE(r.converged);
  CHECK(std::abs(landing_point(r) - (1.0 - expi(0.6))) < 1e-6);
  auto s = trace_ray(kSiegel, Angle(0, 1));
  REQUIRE(s.converged);
  const cplx beta = 1.0 - expi(kGolden);
  CHECK(std::abs(landing_point(s) - beta) < 1e-6);
  const cplx eta0 = caratheodory_sample(kSiegel, Angle(0, 1));
  CHECK(std::abs(eval(kSiegel, eta0) - eta0) < 1e-6);
}

TEST_CASE("the 3/5 cycle co-lands at 0") {
  for (const Angle& t : parabolic_cycle(RotationNumber(3, 5))) {
    auto r = trace_ray(kPara35, t);
    REQUIRE(r.converged);
    CHECK(std::abs(landing_point(r)) < 1e-3);
  }
}

TEST_CASE("co-landing for every nu with p <= 7") {
  for (unsigned p = 2; p <= 7; ++p) {
    for (unsigned q = 1; q < p; ++q) {
      if (std::gcd(p, q) != 1) continue;
      auto m = MapSpec::para(RotationNumber(q, p));
      for (const Angle& t : parabolic_cycle(RotationNumber(q, p))) {
        auto r = trace_ray(m, t);
        CHECK_MESSAGE(r.converged, t.str());
        if (r.landing) CHECK_MESSAGE(std::abs(*r.landing) < 2e-3, q << "/" << p << " " << t.str());
      }
    }
  }
}

TEST_CASE("potentials strictly decrease and samples satisfy the ray equation") {
  for (const MapSpec& m : {kPara35, kSiegel}) {
    for (const Angle& t : {Angle(1, 7), Angle(11, 31), Angle(5, 12)}) {
      auto r = trace_ray(m, t);
      REQUIRE(r.samples.size() > 10);
      for (std::size_t k = 1; k < r.samples.size(); ++k) CHECK(r.samples[k].potential < r.samples[k - 1].potential);
      CHECK(r.samples.back().potential <= 1.01e-8);
      // The field line through each sample points outward along angle t:
      // f^n(z) is near R e^{2 pi i 2^n t} once |f^n(z)| is large.
      for (std::size_t k = 0; k < r.samples.size(); k += 17) {
        cplx z = r.samples[k].z;
        int n = 0;
        while (std::abs(z) < 1e6 && n < 5000) {
          z = eval(m, z);
          ++n;
        }
        // angle of the image against 2^n t, allowing for the lambda z term.
        double want = RayAngle(t).doubled_value(static_cast<std::size_t>(n));
        double got = std::arg(z) / (2 * M_PI);
        CHECK(std::abs(std::remainder(got - want, 1.0)) < 1e-3);
      }
    }
  }
}

TEST_CASE("semiconjugacy on 100 random odd-denominator angles") {
  for (const MapSpec& m : {kPara35, kSiegel}) {
    std::mt19937_64 rng(12);
    double worst = 0;
    int done = 0;
    for (int k = 0; k < 100; ++k) {
      Angle t = random_odd_angle(rng);
      cplx a = caratheodory_sample(m, t), b = caratheodory_sample(m, t.doubled());
      worst = std::max(worst, std::abs(eval(m, a) - b));
      ++done;
    }
    CHECK(done == 100);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("eta(1/3) and eta(2/3) for nu = 1/2") {
  auto m = MapSpec::para(RotationNumber(1, 2));
  cplx a = caratheodory_sample(m, Angle(1, 3)), b = caratheodory_sample(m, Angle(2, 3));
  CHECK(std::abs(eval(m, a) - b) < 1e-4);
  // Real coefficients: eta(1 - t) is the conjugate of eta(t).
  std::mt19937_64 rng(14);
  for (int k = 0; k < 20; ++k) {
    Angle t = random_odd_angle(rng);
    CHECK(std::abs(caratheodory_sample(m, t.negated()) - std::conj(caratheodory_sample(m, t))) < 1e-6);
  }
}

TEST_CASE("landing_point needs a converged trace") {
  RayOptions o;
  o.min_potential = 1e-2;
  o.land_tol = 1e-12;
  o.refine_max_period = 0;
  auto r = trace_ray(kPara35, Angle(11, 31), o);
  CHECK_FALSE(r.converged);
  try {
    landing_point(r);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotConverged);
  }
  CHECK_THROWS_AS(trace_ray(MapSpec::mating(Theta::golden(), RotationNumber(3, 5)), Angle(0, 1)), Error);
}

TEST_CASE("flow angle inverts ray tracing") {
  std::mt19937_64 rng(16);
  for (int k = 0; k < 10; ++k) {
    Angle t = random_odd_angle(rng);
    auto r = trace_ray(kSiegel, t);
    // A sample at moderate potential, well outside the Julia set.
    cplx z = r.samples[r.samples.size() / 2].z;
    FlowAngle f = flow_angle(kSiegel, z);
    CHECK(std::abs(std::remainder(f.value - t.to_double(), 1.0)) < 1e-9);
  }
}

TEST_CASE("external angle of the critical value") {
  OmegaEstimate om = critical_value_angle(kSiegel);
  CHECK(om.error < 1e-3);
  CHECK(om.trusted_bits >= 10);
  const cplx v = eval(kSiegel, -expi(kGolden) / 2.0);
  // The ray at omega ends near v (convergence to the Siegel boundary is slow).
  auto r = trace_ray(kSiegel, om.angle);
  CHECK(std::abs(r.samples.back().z - v) < 0.05);
  // One of the two preimage rays ends near the critical point.
  const std::string bits = om.angle.bits();
  double best = INFINITY;
  for (const char* head : {"0", "1"}) {
    auto pre = trace_ray(kSiegel, RayAngle::from_bits(head + bits));
    best = std::min(best, std::abs(pre.samples.back().z + expi(kGolden) / 2.0));
  }
  CHECK(best < 0.3);
  // The angle read near f(v) is 2 omega.
  OmegaEstimate fv = point_angle(kSiegel, eval(kSiegel, v));
  CHECK(std::abs(std::remainder(fv.value - 2 * om.value, 1.0)) < std::max(4 * om.error, 1e-3));
}
