#pragma once

#include <span>
#include <vector>

namespace zetasum {

// Truncated bivariate Taylor polynomial sum_{i<=nu, j<=nv} c_ij u^i v^j.
// Used to carry parameter derivatives through the spectral ODEs.
class BiJet {
 public:
  BiJet() = default;
  BiJet(int nu, int nv, double constant = 0.0);

  int nu() const { return nu_; }
  int nv() const { return nv_; }
  std::size_t size() const { return c_.size(); }

  double& operator()(int i, int j) { return c_[i * (nv_ + 1) + j]; }
  double operator()(int i, int j) const { return c_[i * (nv_ + 1) + j]; }
  std::span<double> data() { return c_; }
  std::span<const double> data() const { return c_; }

  BiJet& operator+=(const BiJet& o);
  BiJet& operator-=(const BiJet& o);
  BiJet& operator*=(double s);
  friend BiJet operator+(BiJet a, const BiJet& b) { return a += b; }
  friend BiJet operator-(BiJet a, const BiJet& b) { return a -= b; }
  friend BiJet operator*(BiJet a, double s) { return a *= s; }
  friend BiJet operator*(double s, BiJet a) { return a *= s; }
  friend BiJet operator*(const BiJet& a, const BiJet& b);

  BiJet reciprocal() const;
  // log|a|, the constant term must be nonzero.
  BiJet log_abs() const;

 private:
  int nu_ = 0;
  int nv_ = 0;
  std::vector<double> c_;
};

// out = a*b on raw coefficient arrays of shape (nu+1)x(nv+1).
void jet_mul(std::span<const double> a, std::span<const double> b, std::span<double> out, int nu,
             int nv);

}  // namespace zetasum
