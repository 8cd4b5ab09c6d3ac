#include "deepsim/random.hpp"

#include <cmath>

namespace deepsim {

namespace {

// AS 241 PPND16 rational approximations (Wichura 1988), double precision.
constexpr double central_num[8] = {
    3.3871328727963666080e0,  1.3314166789178437745e2,
    1.9715909503065514427e3,  1.3731693765509461125e4,
    4.5921953931549871457e4,  6.7265770927008700853e4,
    3.3430575583588128105e4,  2.5090809287301226727e3};
constexpr double central_den[8] = {
    1.0,                      4.2313330701600911252e1,
    6.8718700749205790830e2,  5.3941960214247511077e3,
    2.1213794301586595867e4,  3.9307895800092710610e4,
    2.8729085735721942674e4,  5.2264952788528545610e3};
constexpr double middle_num[8] = {
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double middle_den[8] = {
    1.0,                      2.05319162663775882187e0,
    1.67638483018380384940e0, 6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double tail_num[8] = {
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double tail_den[8] = {
    1.0,                      5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

double rational(const double (&num)[8], const double (&den)[8], double x) {
  double n = num[7];
  double d = den[7];
  for (int i = 6; i >= 0; --i) {
    n = n * x + num[i];
    d = d * x + den[i];
  }
  return n / d;
}

}  // namespace

double normal_quantile(double p) {
  const double q = p - 0.5;
  if (q >= -0.425 && q <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * rational(central_num, central_den, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  if (!(r > 0.0)) throw ConfigError("normal_quantile requires p in (0, 1)");
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    value = rational(middle_num, middle_den, r - 1.6);
  } else {
    value = rational(tail_num, tail_den, r - 5.0);
  }
  return q < 0.0 ? -value : value;
}

LogNormalUnderlying lognormal_underlying(const LogNormalSpec& spec) {
  if (!(spec.mean > 0.0)) throw NonPositiveMean(spec.mean);
  if (spec.std_dev < 0.0) throw NegativeStd(spec.std_dev);
  const double mean_sq = spec.mean * spec.mean;
  const double var = spec.std_dev * spec.std_dev;
  return {std::log(mean_sq / std::sqrt(mean_sq + var)),
          std::sqrt(std::log(1.0 + var / mean_sq))};
}

double sample_lognormal(RandomStream& stream, const LogNormalSpec& spec) {
  const LogNormalUnderlying under = lognormal_underlying(spec);
  const double uniform = stream.next_uniform();
  if (spec.std_dev == 0.0) return spec.mean;
  return std::exp(under.mu + under.sigma * normal_quantile(uniform));
}

double sample_normal_clamped(RandomStream& stream, double mean, double std_dev,
                             double floor) {
  return stream.next_normal_clamped(mean, std_dev, floor);
}

}  // namespace deepsim
