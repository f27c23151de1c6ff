#include "mating/parabolic_local.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mating/error.hpp"

namespace mating {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSamples = 128;
constexpr int kMaxDegree = 48;
constexpr int kRadii = 24;
constexpr double kStallAccept = 1e-7;

struct CircleFit {
  double r = 0;
  bool finite = false;
  std::vector<cplx> c;    // Cauchy coefficients
  double sup = 0;         // max |g| on the circle
  double residual = 1;    // truncated model error at the mid angles, relative
};

CircleFit fit_on_circle(const HoloMap& f, cplx zeta0, double r) {
  CircleFit fit;
  fit.r = r;
  std::vector<cplx> g(kSamples);
  for (int j = 0; j < kSamples; ++j) {
    const cplx h = std::polar(r, 2 * kPi * j / kSamples);
    g[j] = f(zeta0 + h) - zeta0 - h;
    if (!std::isfinite(g[j].real()) || !std::isfinite(g[j].imag())) return fit;
    fit.sup = std::max(fit.sup, std::abs(g[j]));
  }
  fit.finite = true;
  fit.c.assign(kMaxDegree + 1, 0.0);
  for (int k = 0; k <= kMaxDegree; ++k) {
    cplx s = 0;
    for (int j = 0; j < kSamples; ++j) s += g[j] * std::polar(1.0, -2 * kPi * double(j) * k / kSamples);
    fit.c[k] = s / double(kSamples) / std::pow(r, k);
  }
  double worst = 0, scale = 0;
  for (int j = 0; j < kSamples; ++j) {
    const cplx h = std::polar(r, 2 * kPi * (j + 0.5) / kSamples);
    const cplx val = f(zeta0 + h) - zeta0 - h;
    if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) return fit;
    cplx model = 0;
    for (int k = kMaxDegree; k >= 0; --k) model = model * h + fit.c[k];
    worst = std::max(worst, std::abs(val - model));
    scale = std::max(scale, std::abs(val));
  }
  fit.residual = scale > 0 ? worst / scale : 0;
  return fit;
}

// Power series helpers, all truncated at degree n.
using Series = std::vector<cplx>;

Series series_log1p(const Series& u) {
  const std::size_t n = u.size();
  Series L(n, 0.0);
  for (std::size_t m = 1; m < n; ++m) {
    cplx s = double(m) * u[m];
    for (std::size_t k = 1; k < m; ++k) s -= double(k) * L[k] * u[m - k];
    L[m] = s / double(m);
  }
  return L;
}

Series series_exp_scaled(const Series& L, double k) {
  const std::size_t n = L.size();
  Series E(n, 0.0);
  E[0] = 1;
  for (std::size_t m = 1; m < n; ++m) {
    cplx s = 0;
    for (std::size_t j = 1; j <= m; ++j) s += double(j) * L[j] * E[m - j];
    E[m] = k * s / double(m);
  }
  return E;
}

cplx principal_root(cplx w, int p) { return std::polar(std::pow(std::abs(w), 1.0 / p), std::arg(w) / p); }

std::vector<cplx> roots_of(cplx w, int p) {
  std::vector<cplx> out;
  const cplx r = principal_root(w, p);
  for (int j = 0; j < p; ++j) out.push_back(r * std::polar(1.0, 2 * kPi * j / p));
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) { return std::arg(x) < std::arg(y); });
  return out;
}

}  // namespace

ParabolicGerm fit_germ(const HoloMap& f, cplx zeta0, int max_p, const FitOptions& opts) {
  std::vector<CircleFit> fits;
  double r = opts.max_radius;
  for (int j = 0; j < kRadii; ++j, r /= 2) fits.push_back(fit_on_circle(f, zeta0, r));

  // Per coefficient, trust the radius where two neighbouring circles agree best.
  const double eps = 2.2e-16;
  std::vector<cplx> best(kMaxDegree + 1, 0.0);
  std::vector<double> err(kMaxDegree + 1, INFINITY);
  for (int k = 0; k <= kMaxDegree; ++k) {
    for (int j = 0; j + 1 < kRadii; ++j) {
      const auto& A = fits[j];
      const auto& B = fits[j + 1];
      if (!A.finite || !B.finite) continue;
      const double roundoff = 8 * eps * (A.sup + A.r * (1 + std::abs(zeta0) / A.r)) / std::pow(A.r, k);
      const double e = std::abs(A.c[k] - B.c[k]) + roundoff;
      if (e < err[k]) {
        err[k] = e;
        best[k] = A.c[k];
      }
    }
  }
  if (!std::isfinite(err[0])) throw Error(Errc::NotParabolic, "map is not finite near the fixed point");
  if (std::abs(best[0]) > opts.parabolic_tol * std::max(1.0, std::abs(zeta0)))
    throw Error(Errc::NotParabolic, "not a fixed point (|f(z0) - z0| = " + std::to_string(std::abs(best[0])) + ")");
  if (std::abs(best[1]) > opts.parabolic_tol)
    throw Error(Errc::NotParabolic, "|f'(z0) - 1| = " + std::to_string(std::abs(best[1])));

  ParabolicGerm g;
  g.zeta0 = zeta0;
  int lead = -1;
  for (int k = 2; k <= std::min(max_p + 1, kMaxDegree); ++k) {
    if (std::abs(best[k]) > std::max(100 * err[k], opts.tol)) {
      lead = k;
      break;
    }
  }
  if (lead < 0) throw Error(Errc::DegreeNotFound, "no nonzero coefficient up to degree " + std::to_string(max_p + 1));
  g.p = lead - 1;
  g.a = best[lead];
  g.a_error = err[lead] / std::abs(g.a);
  g.taylor.assign(kMaxDegree + 1, 0.0);
  for (int k = lead; k <= kMaxDegree; ++k)
    if (std::abs(best[k]) > 100 * err[k]) g.taylor[k] = best[k];

  g.delta = fits.back().r;
  for (const auto& fit : fits) {
    if (fit.finite && fit.residual < 0.01) {
      g.delta = fit.r;
      break;
    }
  }
  return g;
}

std::vector<cplx> attracting_vectors(const ParabolicGerm& g) { return roots_of(-1.0 / (double(g.p) * g.a), g.p); }

std::vector<cplx> repelling_vectors(const ParabolicGerm& g) { return roots_of(1.0 / (double(g.p) * g.a), g.p); }

bool in_sector(const Sector& s, cplx z) {
  const cplx h = z - s.zeta0;
  const double r = std::abs(h);
  if (!(r > 0) || !(r < s.delta)) return false;
  return std::abs(std::arg(h / s.v)) < s.alpha / 2;
}

Sector attracting_sector(const ParabolicGerm& g, cplx v) {
  return {g.zeta0, v, 31 * kPi / (16 * g.p), g.delta};
}

FatouSeries::FatouSeries(const ParabolicGerm& g, cplx v, int order) : zeta0_(g.zeta0), v_(v), p_(g.p) {
  const int M = order;
  const int p = g.p;
  // f(z)/z = 1 + u(z) in the local coordinate. The h^{-p} term reaches
  // degree M + p of u.
  Series u(M + p + 1, 0.0);
  for (int j = p; j <= M + p; ++j) {
    const std::size_t k = static_cast<std::size_t>(j + 1);
    if (k < g.taylor.size()) u[j] = g.taylor[k];
  }
  u[p] = g.a;
  const Series L = series_log1p(u);

  d_.assign(static_cast<std::size_t>(M + 1), 0.0);
  Series R(M + 1, 0.0);
  R[0] = 1;
  for (int m = 0; m <= M; ++m) {
    Series S(M + 1, 0.0);
    if (m == p) {
      S = L;
    } else {
      const int k = m - p;
      const Series E = series_exp_scaled(L, k);
      for (int d = m; d <= M; ++d) S[d] = E[d - k];
    }
    const cplx unknown = R[m] / S[m];
    for (int d = m; d <= M; ++d) R[d] -= unknown * S[d];
    if (m == p) {
      beta_ = unknown;
    } else {
      d_[static_cast<std::size_t>(m)] = unknown;
    }
  }
}

cplx FatouSeries::operator()(cplx z) const {
  const cplx h = z - zeta0_;
  cplx s = beta_ * std::log(h / v_);
  // Horner over k = -p..M-p (d_0 is zero).
  const int M = static_cast<int>(d_.size()) - 1;
  cplx pos = 0;
  for (int k = M - p_; k >= 1; --k) pos = (pos + d_[static_cast<std::size_t>(k + p_)]) * h;
  cplx neg = 0;
  const cplx ih = 1.0 / h;
  for (int k = -p_; k <= -1; ++k) neg = (neg + d_[static_cast<std::size_t>(k + p_)]) * ih;
  return s + pos + neg;
}

double default_x0(const ParabolicGerm& g) {
  return 1.0 / (g.p * std::abs(g.a) * std::pow(g.delta, g.p)) + 2.0;
}

cplx fatou_coordinate(const HoloMap& f, const ParabolicGerm& g, cplx v, cplx z, const FatouParams& fp) {
  const Sector s = attracting_sector(g, v);
  if (!in_sector(s, z)) throw Error(Errc::LeftSector, "start point outside the attracting sector");
  const FatouSeries psi(g, v, 2 * g.p + 6);
  const double near = g.delta / 2;

  std::size_t checkpoint = 0;
  bool have = false;
  cplx last = 0, best = 0;
  double best_diff = INFINITY;
  cplx w = z;
  for (std::size_t n = 0; n <= fp.n_iter; ++n) {
    if (n > 0) {
      w = f(w);
      if (!in_sector(s, w)) throw Error(Errc::LeftSector, "orbit left the attracting sector at step " + std::to_string(n));
    }
    if (std::abs(w - g.zeta0) >= near) continue;
    if (!have) {
      have = true;
      last = psi(w) - double(n);
      checkpoint = 2 * n + 8;
      continue;
    }
    if (n == checkpoint) {
      const cplx cur = psi(w) - double(n);
      const double diff = std::abs(cur - last);
      if (diff < fp.tol) return cur;
      // Deep in the petal, rounding in the orbit grows like n; once the
      // changes start growing the smallest one is as good as it gets.
      if (diff < best_diff) {
        best_diff = diff;
        best = cur;
      } else if (best_diff < kStallAccept && diff > 2 * best_diff) {
        return best;
      }
      last = cur;
      checkpoint = 2 * n + 8;
    }
  }
  throw Error(Errc::NotConverged, "Fatou coordinate did not settle within " + std::to_string(fp.n_iter) + " iterates");
}

bool petal_membership(const HoloMap& f, const ParabolicGerm& g, cplx v, cplx z, const FatouParams& fp) {
  if (!in_sector(attracting_sector(g, v), z)) return false;
  const double x0 = fp.x0.value_or(default_x0(g));
  try {
    return fatou_coordinate(f, g, v, z, fp).real() > x0;
  } catch (const Error& e) {
    if (e.code() == Errc::LeftSector) return false;
    throw Error(Errc::Undecided, "orbit still near the repelling axis when the budget ran out");
  }
}

namespace {

// Leading coefficient a of f(z) - z = a h^{p+1} + ... by least squares over
// the second half of the orbit: y_n = (z_{n+1} - z_n) / h_n^{p+1} is fitted
// by a cubic in the centred variable w = (h - c) / r and evaluated at h = 0.
cplx tail_coefficient(std::span<const cplx> orbit, int p, cplx zeta0) {
  constexpr int K = 4;
  const std::size_t N = orbit.size();
  const std::size_t first = N / 2, count = std::min<std::size_t>(N - 1 - first, 512);
  const double stride = double(N - 1 - first) / double(count);
  auto index = [&](std::size_t i) { return first + static_cast<std::size_t>(i * stride); };
  cplx c = 0;
  for (std::size_t i = 0; i < count; ++i) c += orbit[index(i)] - zeta0;
  c /= double(count);
  double r = 0;
  for (std::size_t i = 0; i < count; ++i) r = std::max(r, std::abs(orbit[index(i)] - zeta0 - c));
  if (!(r > 0)) return INFINITY;
  std::vector<std::vector<cplx>> M(K, std::vector<cplx>(K + 1, 0.0));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = index(i);
    const cplx h = orbit[j] - zeta0;
    const cplx y = (orbit[j + 1] - orbit[j]) / std::pow(h, p + 1);
    cplx row[K];
    row[0] = 1;
    for (int k = 1; k < K; ++k) row[k] = row[k - 1] * ((h - c) / r);
    for (int a = 0; a < K; ++a) {
      for (int b = 0; b < K; ++b) M[a][b] += std::conj(row[a]) * row[b];
      M[a][K] += std::conj(row[a]) * y;
    }
  }
  for (int col = 0; col < K; ++col) {
    int piv = col;
    for (int a = col + 1; a < K; ++a)
      if (std::abs(M[a][col]) > std::abs(M[piv][col])) piv = a;
    std::swap(M[col], M[piv]);
    if (std::abs(M[col][col]) == 0) return INFINITY;
    for (int a = 0; a < K; ++a) {
      if (a == col) continue;
      const cplx f = M[a][col] / M[col][col];
      for (int k = col; k <= K; ++k) M[a][k] -= f * M[col][k];
    }
  }
  cplx value = 0;
  const cplx w0 = -c / r;
  for (int k = K - 1; k >= 0; --k) value = value * w0 + M[k][K] / M[k][k];
  return value;
}

}  // namespace

ConvergenceDirection convergence_direction(std::span<const cplx> orbit, int p, cplx zeta0) {
  const std::size_t N = orbit.size();
  if (N < 64 || p < 1) throw Error(Errc::NoConvergence, "orbit too short");
  for (cplx z : orbit)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error(Errc::NoConvergence, "orbit is not finite");
  auto x = [&](std::size_t n) {
    const cplx h = orbit[n] - zeta0;
    if (h == 0.0) throw Error(Errc::NoConvergence, "orbit hits the fixed point");
    return std::pow(h, -p);
  };
  // x_n ~ s n + c log n + const; Richardson over n, 2n, 4n removes the log term.
  auto slope = [&](std::size_t n4) {
    const std::size_t n1 = n4 / 4, n2 = n4 / 2;
    const cplx e1 = (x(n2) - x(n1)) / double(n2 - n1);
    const cplx e2 = (x(n4) - x(n2)) / double(n4 - n2);
    return 2.0 * e2 - e1;
  };
  const double tail = std::abs(orbit[N - 1] - zeta0);
  if (!(tail < std::abs(orbit[N / 2] - zeta0)) || !(tail < 1.0))
    throw Error(Errc::NoConvergence, "orbit tail is not approaching the fixed point");
  const cplx s = slope(N - 1);
  const cplx s_half = slope((N - 1) / 2);
  if (!(std::abs(s) > 0) || std::abs(s - s_half) > 1e-2 * std::abs(s))
    throw Error(Errc::NoConvergence, "tail slope has not stabilized");
  // The slope carries n^{1-k/p} corrections from the higher Taylor terms.
  // Fitting (z_{n+1} - z_n) / h_n^{p+1} = a + b h_n + ... on the tail gives
  // a itself, and s = -p a.
  const cplx a = tail_coefficient(orbit, p, zeta0);
  const cplx s_fit = -double(p) * a;
  const cplx s_best = std::abs(s_fit - s) < 1e-2 * std::abs(s) ? s_fit : s;
  const double n = double(N - 1);
  const cplx guess = std::pow(n, 1.0 / p) * (orbit[N - 1] - zeta0);
  const auto candidates = roots_of(1.0 / s_best, p);
  cplx v = candidates.front();
  for (cplx c : candidates)
    if (std::abs(c - guess) < std::abs(v - guess)) v = c;
  return {v, std::abs(guess - v)};
}

}  // namespace mating
