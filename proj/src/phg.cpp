#include "zetasum/phg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zetasum/errors.hpp"

namespace zetasum {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// j-fold convolution power of the free kernel e^{-mu d}/(2 mu); the
// polynomial in mu d is a reverse Bessel polynomial of order j - 1.
double kernel_real_power(int j, double mu, double d) {
  const int n = j - 1;
  const double t = mu * d;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    s += factorial(2 * n - k) / (std::pow(2.0, n - k) * factorial(k) * factorial(n - k)) *
         std::pow(t, k);
  }
  return std::exp(-t) * s / (factorial(j - 1) * std::pow(2.0, j) * std::pow(mu, 2 * j - 1));
}

// Drops trailing coefficients at the fit noise level, read off the last
// quarter of the series, so noisy profiles do not look unresolved downstream.
Chebyshev chop(const Chebyshev& p) {
  auto c = p.coeffs();
  const std::size_t n = c.size();
  double noise = 0.0;
  for (std::size_t j = n - n / 4; j < n; ++j) noise = std::max(noise, std::abs(c[j]));
  std::size_t keep = 1;
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(c[j]) > 8.0 * noise) keep = j + 1;
  c.resize(keep);
  return Chebyshev(std::move(c), p.lower(), p.upper());
}

}  // namespace

double kernel_C(double mu, double theta) {
  if (!(mu > 0.0)) throw DomainError("kernel needs mu > 0");
  const double den = mu * std::sin(theta) - std::cos(theta);
  if (std::abs(den) < 1e-14 * (1.0 + mu)) {
    throw DomainError("kernel coefficient C has a pole at mu sin(theta) = cos(theta)");
  }
  return (mu * std::sin(theta) + std::cos(theta)) / den;
}

double kernel_eval(KernelKind kind, const KernelParams& p) {
  if (!(p.mu > 0.0)) throw DomainError("kernel needs mu > 0");
  if (p.x < 0.0 || p.y < 0.0) throw DomainError("kernel points must be nonnegative");
  const double mu = p.mu;
  const double near = std::exp(-mu * std::abs(p.x - p.y)) / (2 * mu);
  const double far = std::exp(-mu * (p.x + p.y)) / (2 * mu);
  switch (kind) {
    case KernelKind::K_R: return near;
    case KernelKind::K_plus: return kernel_C(mu, p.theta) * far;
    case KernelKind::K_theta: return near + kernel_C(mu, p.theta) * far;
    case KernelKind::K_R_power:
      if (p.j < 1) throw DomainError("convolution power must be at least 1");
      return kernel_real_power(p.j, mu, std::abs(p.x - p.y));
  }
  throw DomainError("unknown kernel kind");
}

double HomogeneousCoefficient::operator()(double lambda, double z) const {
  const double r = std::hypot(lambda, z);
  if (!(r > 0.0)) throw DomainError("homogeneous coefficient is singular at the origin");
  return std::pow(r, -gamma) * profile(std::atan2(z, lambda));
}

double HomogeneousCoefficient::d_lambda(double lambda, double z) const {
  const double r = std::hypot(lambda, z);
  if (!(r > 0.0)) throw DomainError("homogeneous coefficient is singular at the origin");
  const double phi = std::atan2(z, lambda);
  const double g = profile(phi);
  const double dg = profile.derivative()(phi);
  return std::pow(r, -gamma - 1) * (-gamma * std::cos(phi) * g - std::sin(phi) * dg);
}

double PhgExpansion::evaluate(double lambda, double z) const {
  double s = 0.0;
  for (const auto& c : coefficients) s += c(lambda, z);
  return s;
}

PhgExpansion extract_phg(const TraceFn& trace, double gamma0, const PhgOptions& opt,
                         const std::string& provenance) {
  if (opt.K < 0) throw DomainError("expansion order must be nonnegative");
  if (opt.rays < 3 || opt.rays % 2 == 0) throw DomainError("ray count must be odd and at least 3");
  if (!(opt.r0 > 0.0) || !(opt.ratio > 1.0)) throw DomainError("bad radius ladder");
  if (opt.eps < 0.0 || opt.eps >= kHalfPi / 2) throw DomainError("ray margin out of range");

  const int terms = opt.K + 1 + opt.extra_terms;
  if (opt.radii < 2 * terms) {
    throw DomainError("radius ladder needs at least " + std::to_string(2 * terms) + " radii");
  }
  const auto phi = Chebyshev::lobatto_nodes(opt.eps, kHalfPi - opt.eps, opt.rays);
  std::vector<double> radii(opt.radii);
  for (int m = 0; m < opt.radii; ++m) radii[m] = opt.r0 * std::pow(opt.ratio, m);

  const std::size_t nr = radii.size();
  auto samples = parallel_map(phi.size() * nr, [&](std::size_t k) {
    const double r = radii[k % nr], p = phi[k / nr];
    return trace(r * std::cos(p), r * std::sin(p));
  });

  const auto model = AsymptoticModel::powers(-gamma0, terms);
  FitOptions fo;
  fo.max_residual = opt.max_residual;
  std::vector<std::vector<double>> g(opt.K + 1, std::vector<double>(phi.size()));
  double residual = 0.0;
  std::vector<AsymptoticExpansion> fits(phi.size());
  for (std::size_t a = 0; a < phi.size(); ++a) {
    std::span<const double> y(samples.data() + a * nr, nr);
    try {
      fits[a] = fit_expansion(radii, y, model, fo);
    } catch (const FitError& e) {
      throw NumericalError("expansion fit failed on ray phi = " + std::to_string(phi[a]) + ": " +
                           e.what());
    }
    residual = std::max(residual, fits[a].fit_residual);
    for (int i = 0; i <= opt.K; ++i) g[i][a] = fits[a].coefficient(-gamma0 - i);
  }

  PhgExpansion out;
  out.gamma0 = gamma0;
  out.remainder_order = gamma0 + opt.K + 1;
  out.provenance = provenance;
  out.fit_residual = residual;
  for (int i = 0; i <= opt.K; ++i) {
    HomogeneousCoefficient c;
    c.index = i;
    c.gamma = gamma0 + i;
    c.phi = phi;
    c.g = g[i];
    c.profile = chop(Chebyshev::from_values(g[i], opt.eps, kHalfPi - opt.eps));
    // every other node gives a coarser interpolant of the same data
    std::vector<double> half;
    for (std::size_t a = 0; a < phi.size(); a += 2) half.push_back(g[i][a]);
    Chebyshev coarse = Chebyshev::from_values(half, opt.eps, kHalfPi - opt.eps);
    double dev = 0.0;
    for (std::size_t a = 1; a < phi.size(); a += 2)
      dev = std::max(dev, std::abs(coarse(phi[a]) - g[i][a]));
    c.interp_error = dev;
    out.coefficients.push_back(std::move(c));
  }

  // held-out radius between ladder points, at angles between rays
  out.held_out_radius = opt.r0 * std::pow(opt.ratio, 2.5);
  double worst = 0.0;
  for (std::size_t a = 0; a + 1 < phi.size(); a += 4) {
    const double p = 0.5 * (phi[a] + phi[a + 1]);
    const double lam = out.held_out_radius * std::cos(p), z = out.held_out_radius * std::sin(p);
    const double t = trace(lam, z);
    // the truncated sum plus the fitted higher terms interpolated in angle
    double extra = 0.0;
    for (int i = opt.K + 1; i < terms; ++i) {
      std::vector<double> gi(phi.size());
      for (std::size_t b = 0; b < phi.size(); ++b) gi[b] = fits[b].coefficient(-gamma0 - i);
      extra += Chebyshev::from_values(gi, opt.eps, kHalfPi - opt.eps)(p) *
               std::pow(out.held_out_radius, -gamma0 - i);
    }
    worst = std::max(worst, std::abs(t - out.evaluate(lam, z) - extra) / std::abs(t));
  }
  out.held_out_error = worst;
  if (!(worst <= opt.max_residual)) {
    throw NumericalError("expansion fails the held-out radius check: relative error " +
                         std::to_string(worst));
  }
  return out;
}

double coeff_slice(const PhgExpansion& e, int i, double z, int d_lambda) {
  if (i < 0 || i >= static_cast<int>(e.coefficients.size())) {
    throw DomainError("coefficient index " + std::to_string(i) + " beyond the extracted order");
  }
  if (!(z >= 0.0)) throw DomainError("slice needs z >= 0");
  const auto& c = e.coefficients[i];
  if (d_lambda == 0) return c(1.0, z);
  if (d_lambda == 1) return c.d_lambda(1.0, z);
  throw DomainError("only d_lambda in {0, 1} is supported");
}

HomogeneousFunction slice_function(const PhgExpansion& e, int i, int z_power, int d_lambda) {
  if (i < 0 || i >= static_cast<int>(e.coefficients.size())) {
    throw DomainError("coefficient index " + std::to_string(i) + " beyond the extracted order");
  }
  if (d_lambda < 0 || d_lambda > 1) throw DomainError("only d_lambda in {0, 1} is supported");
  const HomogeneousCoefficient c = e.coefficients[i];
  const double degree = z_power - c.gamma - d_lambda;
  return HomogeneousFunction(degree, [c, z_power, d_lambda](double x, double y) {
    const double h = d_lambda ? c.d_lambda(y, x) : c(y, x);
    return std::pow(x, z_power) * h;
  });
}

double phg_start_radius(const RealFunction& V) {
  auto q = integrate([&](double x) { return std::sqrt(std::max(V(x), 0.0)); }, 0.0, 1.0);
  const double rate = 2.0 * std::min(q.value, 1.0);
  if (!(rate > 0.0)) throw DomainError("V must be positive");
  return std::max(16.0, 40.0 / rate);
}

double interior_h0(const RealFunction& V, const RealFunction& W, double lambda, double z) {
  (void)W;  // the leading interior term only sees the principal part
  auto f = [&](double x) {
    const double q = lambda * lambda * V(x) + z * z;
    if (!(q > 0.0)) throw DomainError("interior_h0 needs lambda^2 V + z^2 > 0");
    return 0.25 * std::pow(q, -1.5);
  };
  return integrate(f, 0.0, 1.0, {1e-15, 1e-13}).value;
}

}  // namespace zetasum
