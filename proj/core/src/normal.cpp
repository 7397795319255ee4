#include "pfev/normal.hpp"

#include <bit>
#include <cstdint>

namespace pfev {

double normal_cdf(double z) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

namespace {

// exp(x) for x <= 0 without a libm call; 0 below the normal range. Written
// with integer masks only so that loops calling it vectorize.
inline double exp_nonpositive(double x) {
  constexpr double kLog2e = 1.44269504088896340736;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  constexpr double kShifter = 6755399441055744.0;
  const double shifted = x * kLog2e + kShifter;
  const double n = shifted - kShifter;
  // Same binade as the shifter, so the bit patterns differ by exactly n.
  const std::int64_t ni = std::bit_cast<std::int64_t>(shifted) - std::bit_cast<std::int64_t>(kShifter);
  const double r = (x - n * kLn2Hi) - n * kLn2Lo;
  double p = 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::uint64_t keep = std::uint64_t{0} - static_cast<std::uint64_t>(ni >= -1021);
  const std::uint64_t scale_bits = static_cast<std::uint64_t>(ni + 1023) << 52;
  const double value = p * std::bit_cast<double>(scale_bits & keep);
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(value) & keep);
}

// Chebyshev series in s = 2t - 1, t = 4 / (4 + u), of log(P(Z > u) / t) + u^2 / 2.
constexpr double kTailCoef[] = {
    -1.58059061233332798e+00,
    8.06477374304935157e-01,
    8.38166748104565013e-02,
    -1.08304417040955153e-04,
    -2.48098648906209000e-03,
    -3.50368515809968892e-04,
    6.55717367014928320e-05,
    2.55703466879739264e-05,
    -5.85983180334750972e-07,
    -1.48864277978797325e-06,
    -1.11247509703129749e-07,
    7.72622649676865821e-08,
    1.30310849227119807e-08,
    -3.59539903981425130e-09,
    -1.03292221963455383e-09,
    1.43599766533248555e-10,
    6.94605191936771874e-11,
    -4.15796971224156719e-12,
    -4.16990580449555371e-12,
    -3.15827309620227941e-15,
    2.24661147706599601e-13,
    1.34296977767052294e-14,
    -1.05621780574371806e-14,
    -1.44946563376222484e-15,
    3.92638824992669432e-16,
    1.16049421192624335e-16,
};

}  // namespace

namespace {

inline double tail_kernel(double u) {
  const double t = 4.0 / (4.0 + u);
  const double s2 = 2.0 * (2.0 * t - 1.0);
  // Clenshaw recurrence, written out so the caller's loop has no inner loop.
  double b1 = kTailCoef[25];
  double b2 = 0.0;
  double b0;
  b0 = s2 * b1 - b2 + kTailCoef[24]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[23]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[22]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[21]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[20]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[19]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[18]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[17]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[16]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[15]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[14]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[13]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[12]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[11]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[10]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[9]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[8]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[7]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[6]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[5]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[4]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[3]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[2]; b2 = b1; b1 = b0;
  b0 = s2 * b1 - b2 + kTailCoef[1]; b2 = b1; b1 = b0;
  const double g = 0.5 * s2 * b1 - b2 + kTailCoef[0];
  return t * exp_nonpositive(g - 0.5 * u * u);
}

}  // namespace

double normal_tail(double u) { return tail_kernel(u); }

void normal_tail_inplace(double* data, long n) {
  for (long i = 0; i < n; ++i) data[i] = tail_kernel(data[i]);
}

double vector_friendly_cos(double t) {
  // Cody-Waite reduction by pi/2 into [-pi/4, pi/4]; the quadrant is read
  // from the low mantissa bits of the rounded multiple, so the whole body is
  // branch-free.
  constexpr double kTwoOverPi = 0.63661977236758134308;
  constexpr double kPio2Hi = 1.57079632673412561417e+00;
  constexpr double kPio2Mid = 6.07710050650619224932e-11;
  constexpr double kPio2Lo = 2.02226624879595063154e-21;
  constexpr double kShifter = 6755399441055744.0;  // 1.5 * 2^52

  const double shifted = t * kTwoOverPi + kShifter;
  const std::uint64_t quadrant = std::bit_cast<std::uint64_t>(shifted);
  const double k = shifted - kShifter;
  const double r = ((t - k * kPio2Hi) - k * kPio2Mid) - k * kPio2Lo;
  const double z = r * r;

  const double c =
      1.0 + z * (-0.5 + z * (4.16666666666666019037e-02 +
                             z * (-1.38888888888741095749e-03 +
                                  z * (2.48015872894767294178e-05 +
                                       z * (-2.75573143513906633035e-07 +
                                            z * (2.08757232129817482790e-09 +
                                                 z * -1.13596475577881948265e-11))))));
  const double s =
      r + r * z *
              (-1.66666666666666324348e-01 +
               z * (8.33333333332248946124e-03 +
                    z * (-1.98412698298579493134e-04 +
                         z * (2.75573137070700676789e-06 +
                              z * (-2.50507602534068634195e-08 + z * 1.58969099521155010221e-10)))));

  // cos(r + q pi/2) = { c, -s, -c, s } for q = 0..3
  const std::uint64_t pick_sin = std::uint64_t{0} - (quadrant & 1u);
  std::uint64_t bits = (std::bit_cast<std::uint64_t>(s) & pick_sin) |
                       (std::bit_cast<std::uint64_t>(c) & ~pick_sin);
  bits ^= ((quadrant + 1u) & 2u) << 62;
  return std::bit_cast<double>(bits);
}

void cos_inplace(double* data, long n) {
  for (long i = 0; i < n; ++i) data[i] = vector_friendly_cos(data[i]);
}

}  // namespace pfev
