#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zetasum/homog.hpp"
#include "zetasum/numerics.hpp"
#include "zetasum/regcal.hpp"

namespace zetasum {

// ---- half-line model kernels ----

enum class KernelKind { K_theta, K_R, K_plus, K_R_power };

struct KernelParams {
  double mu = 1.0;
  double theta = 0.0;
  int j = 1;
  double x = 0.0;
  double y = 0.0;
};

// (mu sin(theta) + cos(theta)) / (mu sin(theta) - cos(theta)).
double kernel_C(double mu, double theta);
double kernel_eval(KernelKind kind, const KernelParams& p);

// ---- joint expansion of a trace in (lambda, z) ----

// h_i(lambda, z) = r^{-gamma} g(phi), (lambda, z) = r (cos phi, sin phi).
struct HomogeneousCoefficient {
  int index = 0;
  double gamma = 0.0;
  std::vector<double> phi;
  std::vector<double> g;
  Chebyshev profile;
  // spread of the profile between the full and a half-node interpolant
  double interp_error = 0.0;

  double operator()(double lambda, double z) const;
  // d/dlambda by the radial and angular chain rule
  double d_lambda(double lambda, double z) const;
};

struct PhgExpansion {
  std::vector<HomogeneousCoefficient> coefficients;
  double gamma0 = 0.0;
  // degree of the first omitted term
  double remainder_order = 0.0;
  std::string provenance;
  double fit_residual = 0.0;
  // relative error of the truncated sum at a radius outside the ladder
  double held_out_error = 0.0;
  double held_out_radius = 0.0;

  double evaluate(double lambda, double z) const;
};

using TraceFn = std::function<double(double lambda, double z)>;

struct PhgOptions {
  int K = 2;
  int rays = 65;
  // rays on [eps, pi/2 - eps]; 0 places rays on both axes
  double eps = 0.0;
  double r0 = 16.0;
  // radius ladder r0 * ratio^m, m = 0..radii-1
  double ratio = 1.4142135623730951;
  int radii = 17;
  // extra powers beyond K absorbed by the radial fit
  int extra_terms = 5;
  double max_residual = 1e-6;
};

PhgExpansion extract_phg(const TraceFn& trace, double gamma0, const PhgOptions& opt = {},
                         const std::string& provenance = "");

// h_i(1, z) or d/dlambda h_i at (1, z).
double coeff_slice(const PhgExpansion& e, int i, double z, int d_lambda = 0);

// z^power d_lambda^k h_i(lambda, z) as a homogeneous function of (x, y) = (z, lambda).
HomogeneousFunction slice_function(const PhgExpansion& e, int i, int z_power, int d_lambda = 0);

// Start radius beyond which e^{-2 r min(int sqrt V, 1)} is below double precision.
double phg_start_radius(const RealFunction& V);

// int_0^1 dx / (4 (lambda^2 V + z^2)^{3/2}), the leading interior coefficient of Tr^-2.
double interior_h0(const RealFunction& V, const RealFunction& W, double lambda, double z);

}  // namespace zetasum
