#include "zetasum/jet.hpp"

#include <cmath>

#include "zetasum/errors.hpp"

namespace zetasum {

BiJet::BiJet(int nu, int nv, double constant)
    : nu_(nu), nv_(nv), c_(static_cast<std::size_t>((nu + 1) * (nv + 1)), 0.0) {
  c_[0] = constant;
}

BiJet& BiJet::operator+=(const BiJet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

BiJet& BiJet::operator-=(const BiJet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

BiJet& BiJet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

void jet_mul(std::span<const double> a, std::span<const double> b, std::span<double> out, int nu,
             int nv) {
  const int w = nv + 1;
  for (int i = 0; i <= nu; ++i) {
    for (int j = 0; j <= nv; ++j) {
      double s = 0.0;
      for (int p = 0; p <= i; ++p) {
        const double* ap = a.data() + p * w;
        const double* bp = b.data() + (i - p) * w;
        for (int q = 0; q <= j; ++q) s += ap[q] * bp[j - q];
      }
      out[i * w + j] = s;
    }
  }
}

BiJet operator*(const BiJet& a, const BiJet& b) {
  BiJet out(a.nu_, a.nv_);
  jet_mul(a.c_, b.c_, out.c_, a.nu_, a.nv_);
  return out;
}

BiJet BiJet::reciprocal() const {
  const double a0 = c_[0];
  if (a0 == 0.0) throw NumericalError("jet reciprocal of a vanishing constant term");
  // 1/a = (1/a0) * sum_k (-d)^k with d = a/a0 - 1 nilpotent of order nu+nv+1
  BiJet d = *this * (1.0 / a0);
  d.c_[0] = 0.0;
  const int order = nu_ + nv_;
  BiJet r(nu_, nv_, 1.0);
  for (int k = 0; k < order; ++k) {
    r = r * d;
    r *= -1.0;
    r.c_[0] += 1.0;
  }
  r *= 1.0 / a0;
  return r;
}

BiJet BiJet::log_abs() const {
  const double a0 = c_[0];
  if (a0 == 0.0) throw NumericalError("jet logarithm of a vanishing constant term");
  BiJet d = *this * (1.0 / a0);
  d.c_[0] = 0.0;
  const int order = nu_ + nv_;
  // log(1+d) = d - d^2/2 + ..., Horner form d(1 - d(1/2 - d(1/3 - ...)))
  BiJet acc(nu_, nv_, 0.0);
  for (int k = order; k >= 1; --k) {
    acc = d * acc;
    acc *= -1.0;
    acc.c_[0] += 1.0 / k;
  }
  acc = d * acc;
  acc.c_[0] = std::log(std::abs(a0));
  return acc;
}

}  // namespace zetasum
