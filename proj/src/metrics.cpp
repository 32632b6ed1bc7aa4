#include "dpnp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpnp {

namespace {

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * 0.3989422804014326779;
}

double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

// Piecewise-linear CDF over the reference grid (node-exact on the
// trapezoidal masses), with inverse.
struct RefCdf {
  std::vector<double> x;
  std::vector<double> c;  // c.front() = 0, c.back() = 1

  explicit RefCdf(const GridDensity& ref) {
    const std::size_t n = ref.points.size();
    if (n < 2) throw std::invalid_argument("metrics: reference grid too small");
    x = ref.points;
    c.resize(n);
    c[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double cell = 0.5 * (ref.values[i] + ref.values[i + 1]) *
                          (ref.points[i + 1] - ref.points[i]);
      c[i + 1] = c[i] + cell;
    }
    const double total = c.back();
    if (!(total > 0.0))
      throw std::invalid_argument("metrics: reference density is zero");
    for (double& v : c) v /= total;
  }

  double cdf(double v) const {
    if (v <= x.front()) return 0.0;
    if (v >= x.back()) return 1.0;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double t = (v - x[i]) / (x[i + 1] - x[i]);
    return c[i] + t * (c[i + 1] - c[i]);
  }

  double quantile(double u) const {
    if (u <= 0.0) return x.front();
    if (u >= 1.0) return x.back();
    const auto it = std::upper_bound(c.begin(), c.end(), u);
    std::size_t i = static_cast<std::size_t>(it - c.begin());
    i = (i == 0) ? 0 : i - 1;
    while (i + 1 < c.size() && c[i + 1] <= c[i]) ++i;  // skip flat cells
    if (i + 1 >= c.size()) return x.back();
    const double t = (u - c[i]) / (c[i + 1] - c[i]);
    return x[i] + t * (x[i + 1] - x[i]);
  }
};

void require_samples(const std::vector<double>& s) {
  if (s.empty()) throw std::invalid_argument("metrics: empty sample set");
}

}  // namespace

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("normal_quantile: u must be in (0, 1)");
  // Acklam's rational initializer, then two Newton corrections.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double cc[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double z;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    z = (((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q +
         cc[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (u > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    z = -(((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q +
          cc[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else {
    const double q = u - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double err = std_normal_cdf(z) - u;
    z -= err / std_normal_pdf(z);
  }
  return z;
}

double wasserstein1_1d(std::vector<double> samples, const GridDensity& ref) {
  require_samples(samples);
  std::sort(samples.begin(), samples.end());
  const RefCdf F(ref);
  const std::size_t n = samples.size();
  // Integrate |sample quantile - reference quantile| over u in (0,1).
  // Breakpoints: sample steps i/n and the reference CDF node levels.
  double w1 = 0.0;
  std::size_t cell = 0;  // reference cell index
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = samples[i];
    double u0 = static_cast<double>(i) / n;
    const double u1 = static_cast<double>(i + 1) / n;
    while (u0 < u1) {
      while (cell + 2 < F.c.size() && F.c[cell + 1] <= u0) ++cell;
      const double useg = std::min(u1, (cell + 2 < F.c.size())
                                           ? std::max(F.c[cell + 1], u0)
                                           : u1);
      // On [u0, useg] the reference quantile is linear: q(u) = p + s (u-c0).
      const double dc = F.c[cell + 1] - F.c[cell];
      const double slope =
          (dc > 0.0) ? (F.x[cell + 1] - F.x[cell]) / dc : 0.0;
      const double q0 = F.x[cell] + slope * (u0 - F.c[cell]);
      const double q1 = F.x[cell] + slope * (useg - F.c[cell]);
      const double g0 = xi - q0;
      const double g1 = xi - q1;
      const double len = useg - u0;
      if (g0 * g1 >= 0.0) {
        w1 += 0.5 * std::abs(g0 + g1) * len;
      } else {  // sign change inside the piece
        const double tz = g0 / (g0 - g1);
        w1 += 0.5 * std::abs(g0) * tz * len +
              0.5 * std::abs(g1) * (1.0 - tz) * len;
      }
      if (useg >= u1) break;
      u0 = useg;
      if (cell + 2 < F.c.size()) ++cell;
    }
  }
  return w1;
}

double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
  require_samples(a);
  require_samples(b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  double w1 = 0.0;
  std::size_t i = 0, j = 0;
  double u = 0.0;
  while (i < n && j < m) {
    const double ua = static_cast<double>(i + 1) / n;
    const double ub = static_cast<double>(j + 1) / m;
    const double next = std::min(ua, ub);
    w1 += std::abs(a[i] - b[j]) * (next - u);
    u = next;
    if (ua <= next) ++i;
    if (ub <= next) ++j;
  }
  return w1;
}

double wasserstein1_gaussian(std::vector<double> samples, double mean,
                             double var) {
  require_samples(samples);
  if (!(var > 0.0))
    throw std::invalid_argument("wasserstein1_gaussian: var must be > 0");
  std::sort(samples.begin(), samples.end());
  const double sigma = std::sqrt(var);
  const std::size_t n = samples.size();
  // For each segment [i/n, (i+1)/n]: integral of |x_i - Q(u)| du, with
  // int Q du = mean*(b-a) - sigma*(pdf(z_b) - pdf(z_a)) and a sign split
  // at u* = Phi((x_i - mean)/sigma).
  double w1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = samples[i];
    const double a = static_cast<double>(i) / n;
    const double b = static_cast<double>(i + 1) / n;
    const double ustar =
        std::min(b, std::max(a, std_normal_cdf((xi - mean) / sigma)));
    const double pa = (a <= 0.0) ? 0.0 : std_normal_pdf(normal_quantile(a));
    const double pb = (b >= 1.0) ? 0.0 : std_normal_pdf(normal_quantile(b));
    const double ps = (ustar <= 0.0 || ustar >= 1.0)
                          ? 0.0
                          : std_normal_pdf(normal_quantile(ustar));
    const double int_left = mean * (ustar - a) - sigma * (ps - pa);
    const double int_right = mean * (b - ustar) - sigma * (pb - ps);
    w1 += (xi * (ustar - a) - int_left) + (int_right - xi * (b - ustar));
  }
  return w1;
}

double binned_tv(const std::vector<double>& samples, const GridDensity& ref,
                 int bins) {
  require_samples(samples);
  if (bins < 1) throw std::invalid_argument("binned_tv: bins must be >= 1");
  const RefCdf F(ref);
  const double lo = ref.points.front();
  const double hi = ref.points.back();
  const double width = (hi - lo) / bins;
  std::vector<double> emp(static_cast<std::size_t>(bins), 0.0);
  const double inc = 1.0 / static_cast<double>(samples.size());
  for (double s : samples) {
    int b = static_cast<int>((s - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    emp[static_cast<std::size_t>(b)] += inc;
  }
  double tv = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double mass = F.cdf(lo + width * (b + 1)) - F.cdf(lo + width * b);
    tv += std::abs(emp[static_cast<std::size_t>(b)] - mass);
  }
  return 0.5 * tv;
}

double ks_statistic(std::vector<double> samples, const GridDensity& ref) {
  require_samples(samples);
  std::sort(samples.begin(), samples.end());
  const RefCdf F(ref);
  const std::size_t n = samples.size();
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fc = F.cdf(samples[i]);
    ks = std::max(ks, std::abs(fc - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(fc - static_cast<double>(i + 1) / n));
  }
  return ks;
}

double tv_grid(const GridDensity& p, const GridDensity& q) {
  if (p.points.size() != q.points.size())
    throw std::invalid_argument("tv_grid: grids differ in size");
  for (std::size_t i = 0; i < p.points.size(); ++i)
    if (std::abs(p.points[i] - q.points[i]) > 1e-12)
      throw std::invalid_argument("tv_grid: grids differ in points");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i)
    tv += std::abs(p.values[i] - q.values[i]);
  return 0.5 * tv * p.spacing;
}

}  // namespace dpnp
