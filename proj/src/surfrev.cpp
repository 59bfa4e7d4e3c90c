#include "zetasum/surfrev.hpp"

namespace zetasum {

SurfaceProfile SurfaceProfile::from_expression(const Expression& r) {
  SurfaceProfile p;
  p.r = r;
  p.dr = r.derivative();
  p.d2r = p.dr.derivative();
  return p;
}

SurfaceProfile SurfaceProfile::parse(const std::string& text) {
  return from_expression(parse_expression(text));
}

void SurfaceProfile::validate() const {
  for (int k = 0; k <= 1000; ++k) {
    const double x = k / 1000.0;
    const double v = r(x);
    if (!(v > 0.0)) {
      throw DomainError("profile r must be positive on [0,1], r(" + std::to_string(x) +
                        ") = " + std::to_string(v));
    }
  }
}

OperatorFamily decompose(const SurfaceProfile& p, BoundaryCondition bc0, BoundaryCondition bc1) {
  p.validate();
  OperatorFamily f;
  const Expression r = p.r, dr = p.dr, d2r = p.d2r;
  f.V = RealFunction([r](double x) {
    const double v = r(x);
    return 1.0 / (v * v);
  });
  f.W = RealFunction([r, dr, d2r](double x) {
    const double v = r(x);
    const double q = dr(x) / (2.0 * v);
    return d2r(x) / (2.0 * v) - q * q;
  });
  f.bc0 = bc0;
  f.bc1 = bc1;
  f.m0 = 1;
  f.m = 2;
  return f;
}

}  // namespace zetasum
