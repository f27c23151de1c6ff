#include "mating/rays.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mating/error.hpp"

namespace mating {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

// The polynomial in the centred coordinate u = z + lambda/2: u^2 + c.
struct Centred {
  cplx half;  // lambda/2
  cplx c;
};

Centred centred(const MapSpec& poly) {
  if (!poly.polynomial()) throw Error(Errc::Parse, "rays need a quadratic polynomial");
  cplx l = poly.lambda();
  return {l / 2.0, l / 2.0 - l * l / 4.0};
}

// f^n(u) and its derivative.
std::pair<cplx, cplx> iterate_d(const Centred& f, cplx u, std::size_t n) {
  cplx w = u, d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    d = 2.0 * w * d;
    w = w * w + f.c;
  }
  return {w, d};
}

// Newton for f^n(u) = target from u. Empty on failure.
std::optional<cplx> newton(const Centred& f, cplx u, std::size_t n, cplx target, int max_it) {
  double prev = 1e300;
  for (int it = 0; it < max_it; ++it) {
    auto [w, d] = iterate_d(f, u, n);
    cplx step = (w - target) / d;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
    u -= step;
    double s = std::abs(step), scale = std::abs(u) + 1e-3;
    if (s <= 4e-16 * scale) return u;
    // Stalled at roundoff.
    if (s <= 1e-11 * scale && s >= 0.5 * prev) return u;
    prev = s;
  }
  return std::nullopt;
}

std::size_t depth_for(double potential, double L) {
  double r = std::log2(L / potential);
  return r <= 0 ? 0 : static_cast<std::size_t>(std::ceil(r - 1e-12));
}

// Quad-precision complex arithmetic for the final polish of a landing.
struct Q {
  __float128 re = 0, im = 0;
};
Q operator+(Q a, Q b) { return {a.re + b.re, a.im + b.im}; }
Q operator-(Q a, Q b) { return {a.re - b.re, a.im - b.im}; }
Q operator*(Q a, Q b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Q operator/(Q a, Q b) {
  __float128 n = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}
__float128 qabs(Q a) { return sqrtq(a.re * a.re + a.im * a.im); }

Q quad_lambda(const MapSpec& poly) {
  __float128 ang;
  if (poly.kind() == MapKind::ParaQuad) {
    ang = 2 * acosq(-1) * static_cast<__float128>(poly.nu().q) / static_cast<__float128>(poly.nu().p);
  } else {
    ang = 2 * acosq(-1) * static_cast<__float128>(poly.theta().value());
  }
  return {cosq(ang), sinq(ang)};
}

struct Polished {
  cplx z;
  cplx multiplier;  // (f^P)'(z)
  double residual;  // |f^P(z) - z|
};

// Multiplicity-robust Newton on f^P(z) - z in quad precision.
std::optional<Polished> polish_periodic(const MapSpec& poly, cplx seed, std::size_t P) {
  Q lam = quad_lambda(poly);
  Q z{seed.real(), seed.imag()};
  Q best = z;
  __float128 best_step = 1e30;
  auto iterate = [&](Q at, Q& d1, Q& d2) {
    Q w = at;
    d1 = Q{1, 0};
    d2 = Q{0, 0};
    for (std::size_t k = 0; k < P; ++k) {
      Q two{2, 0};
      Q l2 = lam + two * w;
      d2 = l2 * d2 + two * d1 * d1;
      d1 = l2 * d1;
      w = lam * w + w * w;
    }
    return w;
  };
  for (int it = 0; it < 400; ++it) {
    Q d1, d2;
    Q g = iterate(z, d1, d2) - z;
    Q g1 = d1 - Q{1, 0};
    Q den = g1 * g1 - g * d2;
    if (qabs(den) == 0) break;
    Q step = g * g1 / den;
    __float128 s = qabs(step);
    if (!(s == s)) break;
    z = z - step;
    if (s < best_step) {
      best_step = s;
      best = z;
    }
    if (s < static_cast<__float128>(1e-30) * (1 + qabs(z))) break;
    if (it > 20 && s > 1e3 * best_step) break;
  }
  Q d1, d2;
  Q g = iterate(best, d1, d2) - best;
  Polished out{{static_cast<double>(best.re), static_cast<double>(best.im)},
               {static_cast<double>(d1.re), static_cast<double>(d1.im)},
               static_cast<double>(qabs(g))};
  if (!std::isfinite(out.z.real()) || !std::isfinite(out.z.imag())) return std::nullopt;
  return out;
}

// Periodic point of period P near z (in the z coordinate, f(z) = lambda z + z^2):
// pull z back along the cycle, then polish.
std::optional<cplx> refine_periodic(const MapSpec& poly, cplx z_end, std::size_t P, double tail) {
  Centred f = centred(poly);
  cplx u = z_end + f.half;
  double last = 1e300;
  for (int it = 0; it < 20000; ++it) {
    auto w = newton(f, u, P, u, 64);
    if (!w) break;
    double d = std::abs(*w - u);
    u = *w;
    if (d < 1e-15 * std::max(1.0, std::abs(u))) break;
    if (it > 50 && d > 4 * last) return std::nullopt;
    last = d;
  }
  cplx zA = u - f.half;
  auto b = polish_periodic(poly, zA, P);
  if (!b) return std::nullopt;
  if (std::abs(b->z - zA) > 0.25 * std::max(std::abs(zA - z_end), tail) + 1e-12) return std::nullopt;
  return b->z;
}

// Slow approach to a parabolic point: the ray ends far from where it lands.
// Accept a polished periodic point only if it is parabolic (multiplier a root
// of unity), and the tail of the ray heads straight for it.
std::optional<cplx> refine_parabolic(const MapSpec& poly, const std::vector<RaySample>& samples, std::size_t P) {
  const cplx z_end = samples.back().z;
  auto b = polish_periodic(poly, z_end, P);
  if (!b || b->residual > 1e-12) return std::nullopt;
  cplx m = b->multiplier;
  bool root_of_unity = false;
  for (std::size_t k = 1; k <= P && !root_of_unity; ++k)
    root_of_unity = std::abs(std::pow(m, static_cast<double>(k)) - 1.0) < 1e-8;
  if (!root_of_unity) return std::nullopt;
  // Distance to the candidate must shrink over the last half of the samples,
  // and the last steps must head roughly at it.
  const std::size_t from = samples.size() / 2;
  double prev = INFINITY;
  for (std::size_t k = from; k < samples.size(); ++k) {
    double d = std::abs(samples[k].z - b->z);
    if (d > prev) return std::nullopt;
    prev = d;
  }
  const std::size_t n = samples.size();
  if (n < 8) return std::nullopt;
  cplx step = samples[n - 1].z - samples[n - 5].z;
  cplx toward = b->z - samples[n - 1].z;
  if (std::abs(step) == 0 || std::cos(std::arg(step / toward)) < 0.5) return std::nullopt;
  return b->z;
}

}  // namespace

RayAngle RayAngle::from_bits(std::string bits) {
  for (char ch : bits)
    if (ch != '0' && ch != '1') throw Error(Errc::Parse, "bit string expected");
  RayAngle r;
  r.bits_ = std::move(bits);
  return r;
}

std::size_t RayAngle::precision() const {
  return exact_ ? static_cast<std::size_t>(-1) : bits_.size();
}

double RayAngle::doubled_value(std::size_t n) const {
  if (exact_) {
    // 2^n t mod 1 without forming 2^n t.
    mpz_class num = exact_->numerator(), den = exact_->denominator();
    mpz_class two_n;
    mpz_powm_ui(two_n.get_mpz_t(), mpz_class(2).get_mpz_t(), n, den.get_mpz_t());
    mpz_class r = (two_n * num) % den;
    mpq_class q(r, den);
    return q.get_d();
  }
  if (n + 24 > bits_.size())
    throw Error(Errc::InsufficientResolution,
                "angle known to " + std::to_string(bits_.size()) + " bits, need more than " + std::to_string(n));
  double v = 0, w = 0.5;
  for (std::size_t i = n; i < bits_.size() && i < n + 60; ++i, w /= 2)
    if (bits_[i] == '1') v += w;
  return v >= 1.0 ? 0.0 : v;
}

std::string RayAngle::str() const {
  if (exact_) return exact_->str();
  return "0b" + bits_;
}

RayTrace trace_ray(const MapSpec& poly, const RayAngle& t, const RayOptions& opts) {
  Centred f = centred(poly);
  const double L = std::log(opts.start_radius);
  const double ratio = std::exp2(-1.0 / opts.steps_per_halving);

  RayTrace out{t, {}, std::nullopt, false, 0, false};
  double rho = L;
  cplx u = std::polar(opts.start_radius, two_pi * t.doubled_value(0));
  out.samples.push_back({rho, u - f.half});

  while (rho > opts.min_potential) {
    double fr = ratio;
    bool ok = false;
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
      double nr = std::max(rho * fr, opts.min_potential);
      std::size_t n = depth_for(nr, L);
      cplx target = std::polar(std::exp(std::ldexp(nr, static_cast<int>(n))), two_pi * t.doubled_value(n));
      auto w = newton(f, u, n, target, opts.max_newton);
      if (w) {
        u = *w;
        rho = nr;
        ok = true;
        break;
      }
      fr = std::sqrt(fr);
    }
    if (!ok) throw Error(Errc::NewtonDiverged, "ray " + t.str() + " stalled at potential " + std::to_string(rho));
    out.samples.push_back({rho, u - f.half});
  }

  const cplx z_end = out.samples.back().z;
  double twice = 2 * out.samples.back().potential;
  auto it = std::min_element(out.samples.begin(), out.samples.end(), [&](const RaySample& a, const RaySample& b) {
    return std::abs(a.potential - twice) < std::abs(b.potential - twice);
  });
  out.tail = std::abs(z_end - it->z);

  if (t.is_exact()) {
    OrbitShape shape = doubling_orbit_shape(t.exact());
    if (shape.period <= opts.refine_max_period) {
      std::optional<cplx> land;
      if (shape.preperiod == 0) {
        land = refine_periodic(poly, z_end, shape.period, out.tail);
        if (!land) land = refine_parabolic(poly, out.samples, shape.period);
      } else {
        Angle s = t.exact();
        for (std::size_t k = 0; k < shape.preperiod; ++k) s = s.doubled();
        RayTrace rs = trace_ray(poly, RayAngle(s), opts);
        if (rs.refined) {
          cplx y = *rs.landing + f.half;
          auto w = newton(f, z_end + f.half, shape.preperiod, y, 200);
          if (w) {
            cplx z = *w - f.half;
            if (std::abs(z - z_end) <= std::max(4 * out.tail, 1e-9) + 2 * std::abs(rs.samples.back().z - *rs.landing))
              land = z;
          }
        }
      }
      if (land) {
        out.landing = land;
        out.converged = true;
        out.refined = true;
        return out;
      }
    }
  }
  out.landing = z_end;
  out.converged = out.tail < opts.land_tol;
  return out;
}

cplx landing_point(const RayTrace& r) {
  if (!r.converged || !r.landing)
    throw Error(Errc::NotConverged, "ray " + r.angle.str() + " did not settle (tail " + std::to_string(r.tail) + ")");
  return *r.landing;
}

cplx caratheodory_sample(const MapSpec& poly, const Angle& t, const RayOptions& opts) {
  return landing_point(trace_ray(poly, RayAngle(t), opts));
}

FlowAngle flow_angle(const MapSpec& poly, cplx z0, const RayOptions& opts) {
  // Escape depths near the Siegel boundary run to thousands, so derivatives
  // of f^n need the long double exponent range.
  using LD = std::complex<long double>;
  Centred f0 = centred(poly);
  const LD c(f0.c.real(), f0.c.imag());
  const long double R = opts.start_radius;
  const long double L = std::log(R);
  const std::size_t max_depth = 12000;

  auto iterate = [&](LD u, std::size_t n) {
    LD w = u, d = 1.0L;
    for (std::size_t k = 0; k < n; ++k) {
      d = 2.0L * w * d;
      w = w * w + c;
    }
    return std::pair<LD, LD>{w, d};
  };
  auto solve = [&](LD u, std::size_t n, LD target) -> std::optional<LD> {
    long double prev = 1e300L;
    for (int it = 0; it < opts.max_newton; ++it) {
      auto [w, d] = iterate(u, n);
      LD step = (w - target) / d;
      long double s = std::abs(step);
      if (!std::isfinite(s)) return std::nullopt;
      u -= step;
      long double scale = std::abs(u) + 1e-3L;
      if (s <= 1e-18L * scale) return u;
      if (s <= 1e-14L * scale && s >= 0.5L * prev) return u;
      prev = s;
    }
    return std::nullopt;
  };
  auto wrap = [](long double a) { return a - std::floor(a); };
  auto dist = [](long double a, long double b) {
    long double d = std::fabs(a - b);
    return std::min(d, 1 - d);
  };
  const long double tau = 2 * std::numbers::pi_v<long double>;

  std::vector<LD> orb{LD(z0.real(), z0.imag()) + LD(f0.half.real(), f0.half.imag())};
  while (std::abs(orb.back()) <= R) {
    if (orb.size() > max_depth) throw Error(Errc::FlowTrapped, "start point does not escape");
    LD w = orb.back();
    orb.push_back(w * w + c);
  }
  std::size_t n = orb.size() - 1;
  // A few more squarings make arg u_N an accurate reading of the angle.
  std::vector<LD> ext = orb;
  while (ext.size() < orb.size() + 4 && std::abs(ext.back()) < 1e300L) {
    LD w = ext.back();
    ext.push_back(w * w + c);
  }
  long double A = wrap(std::arg(ext.back()) / tau);
  for (std::size_t j = ext.size() - 1; j > n; --j) {
    long double target = wrap(std::arg(ext[j - 1]) / tau);
    long double a0 = A / 2, a1 = (A + 1) / 2;
    A = dist(a0, target) <= dist(a1, target) ? a0 : a1;
  }
  // A = frac(2^n angle); its digits follow the n digits read off the flow.
  std::string tail_bits;
  for (long double a = A; tail_bits.size() < 60;) {
    a *= 2;
    tail_bits.push_back(a >= 1 ? '1' : '0');
    if (a >= 1) a -= 1;
  }
  long double rho = std::log(std::abs(ext.back())) / std::ldexp(1.0L, static_cast<int>(ext.size() - 1));

  FlowAngle out;
  out.potential = static_cast<double>(rho);
  std::string head(n, '0');
  LD u = orb[0];
  long double An = A;
  const long double ratio = std::exp2(1.0L / opts.steps_per_halving);
  std::size_t guard = 0;
  while (n > 0) {
    if (++guard > 64 * max_depth) throw Error(Errc::FlowTrapped, "flow did not reach the outer circle");
    long double fr = ratio;
    bool ok = false;
    // Stay at depth n until 2^{n-1} rho reaches L.
    const long double cap = std::ldexp(L, -static_cast<int>(n - 1));
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
      long double nr = std::min(rho * fr, cap);
      LD target = std::polar(std::exp(std::ldexp(nr, static_cast<int>(n))), tau * An);
      auto w = solve(u, n, target);
      if (w) {
        u = *w;
        rho = nr;
        ok = true;
        break;
      }
      fr = std::sqrt(fr);
    }
    if (!ok) throw Error(Errc::FlowTrapped, "Newton failed along the field line");
    if (rho >= cap * (1 - 1e-15L)) {
      long double target = wrap(std::arg(iterate(u, n - 1).first) / tau);
      long double a0 = An / 2, a1 = (An + 1) / 2;
      int b = dist(a0, target) <= dist(a1, target) ? 0 : 1;
      head[n - 1] = static_cast<char>('0' + b);
      An = b ? a1 : a0;
      --n;
    }
  }
  out.bits = head + tail_bits;
  double v = 0, w = 0.5;
  for (std::size_t i = 0; i < out.bits.size() && i < 60; ++i, w /= 2)
    if (out.bits[i] == '1') v += w;
  out.value = v;
  return out;
}

OmegaEstimate point_angle(const MapSpec& poly, cplx target, const OmegaOptions& opts) {
  Centred f = centred(poly);
  // Escape time from z (budget + 1 if it stays).
  auto escape_time = [&](cplx z) {
    cplx u = z + f.half;
    for (std::size_t k = 0; k < opts.escape_budget; ++k) {
      if (std::norm(u) > 1e6) return k;
      u = u * u + f.c;
    }
    return opts.escape_budget + 1;
  };

  OmegaEstimate est;
  std::vector<std::string> runs;
  double off = opts.offset;
  for (int r = 0; r < opts.runs; ++r, off /= 4) {
    // The escaping point on the circle of radius off that escapes fastest.
    std::optional<cplx> start;
    std::size_t best = opts.escape_budget + 1;
    for (int k = 0; k < opts.directions; ++k) {
      cplx z = target + std::polar(off, two_pi * k / opts.directions);
      std::size_t n = escape_time(z);
      if (n < best) {
        best = n;
        start = z;
      }
    }
    if (!start) throw Error(Errc::FlowTrapped, "no escaping point at offset " + std::to_string(off));
    FlowAngle fa = flow_angle(poly, *start);
    runs.push_back(fa.bits);
    est.run_values.push_back(fa.value);
  }
  const std::string& last = runs.back();
  est.value = est.run_values.back();
  est.angle = RayAngle::from_bits(last);
  if (runs.size() < 2) {
    est.error = 1;
  } else {
    const std::string& prev = runs[runs.size() - 2];
    std::size_t common = 0;
    while (common < last.size() && common < prev.size() && last[common] == prev[common]) ++common;
    est.trusted_bits = common;
    double d = std::fabs(est.run_values[est.run_values.size() - 2] - est.value);
    est.error = std::max(std::min(d, 1 - d), std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(common, 60))));
  }
  if (est.error > opts.max_err) throw Error(Errc::Inconsistent, "runs disagree by " + std::to_string(est.error));
  return est;
}

OmegaEstimate critical_value_angle(const MapSpec& poly, const OmegaOptions& opts) {
  if (poly.kind() != MapKind::SiegelQuad) throw Error(Errc::OmegaUnavailable, "omega is defined for the Siegel map");
  cplx l = poly.lambda();
  cplx v = -l * l / 4.0;
  OmegaEstimate est = point_angle(poly, v, opts);

  // Consistency: the ray of omega ends near v; a ray of omega/2 ends near the
  // critical point; the field line of f(v) reads 2 omega. Rays creep into
  // the Siegel boundary slowly, hence the loose tolerance.
  RayOptions ro;
  ro.min_potential = 1e-8;
  RayTrace r = trace_ray(poly, est.angle, ro);
  double dv = std::abs(r.samples.back().z - v);
  if (dv > 0.05) throw Error(Errc::Inconsistent, "ray of omega ends away from the critical value");
  const std::string& b = est.angle.bits();
  RayTrace h0 = trace_ray(poly, RayAngle::from_bits("0" + b), ro);
  RayTrace h1 = trace_ray(poly, RayAngle::from_bits("1" + b), ro);
  cplx x1 = -l / 2.0;
  double dx = std::min(std::abs(h0.samples.back().z - x1), std::abs(h1.samples.back().z - x1));
  if (dx > 1.5 * std::sqrt(dv) + 1e-3)
    throw Error(Errc::Inconsistent, "no preimage ray of omega ends near the critical point");
  OmegaEstimate fv = point_angle(poly, l * v + v * v, opts);
  double two = 2 * est.value;
  two -= std::floor(two);
  double d = std::fabs(two - fv.value);
  if (std::min(d, 1 - d) > std::max(4 * est.error, opts.max_err))
    throw Error(Errc::Inconsistent, "angle of f(v) is not twice omega");
  return est;
}

}  // namespace mating
