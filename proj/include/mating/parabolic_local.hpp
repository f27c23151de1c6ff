#pragma once

// Local analysis at a parabolic fixed point of a map tangent to the identity.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mating {

using cplx = std::complex<double>;
using HoloMap = std::function<cplx(cplx)>;

// f(z) = z + a (z - zeta0)^{p+1} + ...
struct ParabolicGerm {
  cplx zeta0;
  cplx a;
  int p = 1;
  // Coefficients b_k of f(zeta0 + h) - zeta0 - h, k = 0..K.
  std::vector<cplx> taylor;
  // Largest radius where the truncated Taylor model reproduces f - id to 1%.
  double delta = 0;
  // Relative error of a.
  double a_error = 0;
};

struct FitOptions {
  // Allowed |f'(zeta0) - 1| and |f(zeta0) - zeta0|.
  double parabolic_tol = 1e-6;
  // Relative significance threshold for a coefficient.
  double tol = 1e-9;
  double max_radius = 0.5;
};

ParabolicGerm fit_germ(const HoloMap& f, cplx zeta0, int max_p, const FitOptions& opts = {});

// p solutions of p a v^p = -1 (resp. +1), sorted by argument in (-pi, pi].
std::vector<cplx> attracting_vectors(const ParabolicGerm& g);
std::vector<cplx> repelling_vectors(const ParabolicGerm& g);

struct Sector {
  cplx zeta0;
  cplx v;
  double alpha = 0;  // full opening
  double delta = 0;
};

bool in_sector(const Sector& s, cplx z);

// Opening 31 pi / (16 p), radius g.delta.
Sector attracting_sector(const ParabolicGerm& g, cplx v);

struct FatouParams {
  std::size_t n_iter = 2'000'000;
  double tol = 1e-10;
  // Half-plane cutoff for petal membership; defaulted from the germ.
  std::optional<double> x0;
};

// Formal Fatou coordinate psi(h) = sum_{k=-p}^{M-p} d_k h^k + beta log(h/v),
// solving psi(f(z)) = psi(z) + 1 to order h^M.
class FatouSeries {
public:
  FatouSeries(const ParabolicGerm& g, cplx v, int order);
  cplx operator()(cplx z) const;
  cplx beta() const { return beta_; }
  // d_k for k = -p .. M - p.
  cplx coefficient(int k) const { return d_[static_cast<std::size_t>(k + p_)]; }

private:
  cplx zeta0_, v_;
  int p_;
  std::vector<cplx> d_;
  cplx beta_;
};

double default_x0(const ParabolicGerm& g);

// Phi(z), up to an additive constant shared by all calls with the same
// (f, g, v). Throws LeftSector or NotConverged.
cplx fatou_coordinate(const HoloMap& f, const ParabolicGerm& g, cplx v, cplx z, const FatouParams& fp = {});

// z is in the sector of v and Re Phi(z) > x0. Throws Undecided.
bool petal_membership(const HoloMap& f, const ParabolicGerm& g, cplx v, cplx z, const FatouParams& fp = {});

struct ConvergenceDirection {
  cplx v;
  double residual = 0;
};

// v with z_n - zeta0 ~ v / n^{1/p}. Throws NoConvergence.
ConvergenceDirection convergence_direction(std::span<const cplx> orbit, int p, cplx zeta0 = 0);

}  // namespace mating
