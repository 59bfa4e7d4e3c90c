#pragma once

#include <string>

#include "zetasum/decomp.hpp"
#include "zetasum/expr.hpp"

namespace zetasum {

// Profile r(x) > 0 on [0, 1] of the metric dx^2 + r(x)^2 dtheta^2.
struct SurfaceProfile {
  Expression r;
  Expression dr;
  Expression d2r;

  static SurfaceProfile from_expression(const Expression& r);
  static SurfaceProfile parse(const std::string& text);
  // Throws DomainError unless r > 0 on a 1000-interval grid.
  void validate() const;
};

// V = 1/r^2, W = r''/(2r) - (r'/(2r))^2, multiplicities m(0) = 1, m(lambda) = 2.
OperatorFamily decompose(const SurfaceProfile& p, BoundaryCondition bc0 = {},
                         BoundaryCondition bc1 = {});

}  // namespace zetasum
