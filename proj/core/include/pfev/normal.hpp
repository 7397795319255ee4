#pragma once

#include <cmath>

namespace pfev {

/// Standard normal CDF. Exact at the infinities: normal_cdf(-inf) == 0.
double normal_cdf(double z);

/// Upper tail P(Z > u) for u >= 0 (lower tail by symmetry). Branch-free so
/// loops over many arguments vectorize; relative error about 1e-15 up to the
/// underflow point u ~ 37.5, beyond which it returns 0.
double normal_tail(double u);
/// data[i] = normal_tail(data[i]) for i < n.
void normal_tail_inplace(double* data, long n);

/// Standard normal density.
inline double normal_pdf(double z) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

/// cos(t) without a libm call so that loops over feature vectors vectorize.
/// Accurate to a few ulp for |t| < 1e5.
double vector_friendly_cos(double t);

/// out[i] = cos(in[i]) for i < n, using vector_friendly_cos.
void cos_inplace(double* data, long n);

}  // namespace pfev
