#include "dore/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <vector>

#include "dore/error.hpp"

namespace dore {

namespace {

constexpr double kAlpha = 0.05;

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Unbiased (n-1) sample variance.
double variance_of(std::span<const double> v, double mean) {
  double sum = 0.0;
  for (double x : v) sum += (x - mean) * (x - mean);
  return sum / static_cast<double>(v.size() - 1);
}

TTestResult finish(std::string name, double t, double df) {
  TTestResult result;
  result.test = std::move(name);
  result.t = t;
  result.df = df;
  boost::math::students_t_distribution<double> dist(df);
  result.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  result.significant = result.p_value < kAlpha;
  return result;
}

TTestResult degenerate(std::string name, double df) {
  TTestResult result;
  result.test = std::move(name);
  result.df = df;
  result.degenerate = true;
  return result;
}

}  // namespace

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(ErrorCode::invalid_argument, "paired t-test requires equal-length vectors");
  if (a.size() < 2) fail(ErrorCode::invalid_argument, "paired t-test requires at least 2 pairs");

  std::vector<double> diff(a.size());
  for (size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  double n = static_cast<double>(diff.size());
  double mean = mean_of(diff);
  double var = variance_of(diff, mean);
  if (var <= 0.0) return degenerate("paired-t", n - 1.0);
  double t = mean / std::sqrt(var / n);
  return finish("paired-t", t, n - 1.0);
}

TTestResult independent_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    fail(ErrorCode::invalid_argument, "Welch t-test requires at least 2 samples per side");

  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double ma = mean_of(a), mb = mean_of(b);
  double va = variance_of(a, ma), vb = variance_of(b, mb);
  double se2 = va / na + vb / nb;
  if (se2 <= 0.0) return degenerate("welch-t", na + nb - 2.0);
  double t = (ma - mb) / std::sqrt(se2);
  double df = se2 * se2 /
              (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
  return finish("welch-t", t, df);
}

}  // namespace dore
