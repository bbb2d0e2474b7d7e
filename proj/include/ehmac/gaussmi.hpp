#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ehmac/constants.hpp"

// Numerical mutual-information oracle for the unit-noise additive Gaussian
// channel with uniform or discrete inputs. The output density of a sum of
// uniform inputs plus noise has a closed form in repeated integrals of the
// Gaussian, so the differential entropy reduces to 1-D quadrature.

namespace ehmac {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double normal_pdf(double y) {
  return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double y) {
  return 0.5 * std::erfc(-y / std::numbers::sqrt2);
}

namespace detail {

// m-th repeated integral of the standard normal pdf:
// N_0 = pdf, N_1 = cdf, N_m(y) = (y N_{m-1}(y) + N_{m-2}(y)) / (m-1).
inline double repeated_normal_integral(int m, double y) {
  if (m == 0) return normal_pdf(y);
  if (m == 1) return normal_cdf(y);
  double prev2 = normal_pdf(y);
  double prev1 = normal_cdf(y);
  double cur = 0.0;
  for (int k = 2; k <= m; ++k) {
    cur = (y * prev1 + prev2) / (k - 1);
    prev2 = prev1;
    prev1 = cur;
  }
  return cur;
}

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    throw QuadratureError("adaptive quadrature did not converge");
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

// Panels the interval first so a symmetric integrand cannot fool the initial
// Simpson estimate.
template <class F>
double adaptive_quadrature(const F& f, double a, double b, double tol,
                           int panels = 16, int max_depth = 48) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + p * h;
    const double pb = pa + h;
    const double pm = 0.5 * (pa + pb);
    const double fa = f(pa);
    const double fm = f(pm);
    const double fb = f(pb);
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson_rec(f, pa, pb, fa, fm, fb, whole, tol / panels,
                                  max_depth);
  }
  return total;
}

inline double neg_p_log2_p(double p) {
  if (p <= 0.0) return 0.0;  // removable singularity of p log p
  return -p * std::log2(p);
}

}  // namespace detail

// Density of Y = sum_i U_i + N with U_i ~ Unif[-a_i, a_i], N ~ N(0,1):
// the k-fold box convolution expands into 2^k corner terms of the k-th
// repeated Gaussian integral.
class UniformSumDensity {
 public:
  explicit UniformSumDensity(const std::vector<double>& powers) {
    double log_norm = 0.0;
    for (double p : powers) {
      if (p < 0.0) throw std::invalid_argument("negative input power");
      const double a = std::sqrt(p);
      if (a < 1e-9) continue;  // degenerate box: point mass at 0
      half_widths_.push_back(a);
      log_norm += std::log(2.0 * a);
    }
    norm_ = std::exp(-log_norm);
    const std::size_t k = half_widths_.size();
    corners_.reserve(std::size_t{1} << k);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
      double offset = 0.0;
      int parity = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (bits & (std::uint64_t{1} << i)) {
          offset -= half_widths_[i];
          parity ^= 1;
        } else {
          offset += half_widths_[i];
        }
      }
      corners_.push_back({offset, parity ? -1.0 : 1.0});
    }
  }

  double operator()(double y) const {
    const int k = static_cast<int>(half_widths_.size());
    if (k == 0) return normal_pdf(y);
    double sum = 0.0;
    for (const auto& [offset, sign] : corners_) {
      sum += sign * detail::repeated_normal_integral(k, y + offset);
    }
    return std::max(sum * norm_, 0.0);
  }

  // Half-width of the box part; the Gaussian tail hangs beyond it.
  double spread() const {
    double s = 0.0;
    for (double a : half_widths_) s += a;
    return s;
  }

 private:
  struct Corner {
    double offset;
    double sign;
  };
  std::vector<double> half_widths_;
  std::vector<Corner> corners_;
  double norm_ = 1.0;
};

// I(X_I; Y) in bits for Y = sum U_i + N: h(Y) - 0.5 log2(2 pi e), with h(Y)
// integrated over [-L, L], L = sum sqrt(P_i) + 8 noise standard deviations.
// The truncated Gaussian tail beyond 8 sigma contributes < 1e-12 bits.
inline double sum_uniform_awgn_mi(const std::vector<double>& powers,
                                  double tol_bits = 1e-6) {
  const UniformSumDensity density(powers);
  const double limit = density.spread() + 8.0;
  const double entropy = detail::adaptive_quadrature(
      [&](double y) { return detail::neg_p_log2_p(density(y)); }, -limit,
      limit, tol_bits);
  return entropy - gaussian_entropy_bits();
}

// EPI floor 0.5 log2(1 + 2 P / (pi e)) for total uniform input power P.
inline double epi_lower_bound(double total_power) {
  if (total_power < 0.0) throw std::invalid_argument("negative power");
  return half_log2_1p(2.0 * total_power / (std::numbers::pi * std::numbers::e));
}

// Looser floor 0.5 log2(1 + P) - 0.5 log2(pi e / 2); dominated by
// epi_lower_bound for every P >= 0 via log(1 + a x) >= log(1+x) + log a.
inline double epi_lower_bound_loose(double total_power) {
  if (total_power < 0.0) throw std::invalid_argument("negative power");
  return half_log2_1p(total_power) - epi_gap_bits();
}

// I(X; X + N) for a finite input constellation: the output is a Gaussian
// mixture, integrated to the stated tolerance.
inline double mixture_awgn_mi(const std::vector<double>& points,
                              const std::vector<double>& pmf,
                              double tol_bits = 1e-6) {
  if (points.empty() || points.size() != pmf.size()) {
    throw std::invalid_argument("mixture support/pmf mismatch");
  }
  double total = 0.0;
  for (double p : pmf) {
    if (p < 0.0) throw std::invalid_argument("negative pmf entry");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture pmf does not sum to 1");
  }
  const auto density = [&](double y) {
    double f = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      f += pmf[j] * normal_pdf(y - points[j]);
    }
    return f;
  };
  const double lo = *std::min_element(points.begin(), points.end()) - 8.0;
  const double hi = *std::max_element(points.begin(), points.end()) + 8.0;
  const double entropy = detail::adaptive_quadrature(
      [&](double y) { return detail::neg_p_log2_p(density(y)); }, lo, hi,
      tol_bits);
  return entropy - gaussian_entropy_bits();
}

}  // namespace ehmac
