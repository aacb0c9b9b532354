#include "poro/laplace.hpp"

#include <cmath>
#include <numbers>

#include "poro/errors.hpp"

namespace poro {

namespace {

constexpr double kPi = std::numbers::pi;

// Fixed Talbot contour s(theta) = r*theta*(cot(theta) + i), r = 2M/(5t).
std::vector<Complex> talbot_nodes(int M, double t) {
  std::vector<Complex> nodes;
  if (t <= 0.0) return nodes;
  double r = 2.0 * M / (5.0 * t);
  nodes.emplace_back(r, 0.0);
  for (int k = 1; k < M; ++k) {
    double th = k * kPi / M;
    nodes.emplace_back(r * th / std::tan(th), r * th);
  }
  return nodes;
}

double talbot_invert(int M, double t, const std::vector<Complex>& F) {
  if (t <= 0.0) return 0.0;
  double r = 2.0 * M / (5.0 * t);
  Complex acc = 0.5 * F[0] * std::exp(r * t);
  for (int k = 1; k < M; ++k) {
    double th = k * kPi / M;
    double cot = 1.0 / std::tan(th);
    Complex s(r * th * cot, r * th);
    double sigma = th + (th * cot - 1.0) * cot;
    acc += std::exp(s * t) * F[k] * Complex(1.0, sigma);
  }
  return (r / M) * acc.real();
}

// Weeks method: f(t) = e^{sigma t} sum a_n e^{-b t} L_n(2 b t), with the
// generating function sum a_n w^n = (2b/(1-w)) F(sigma + b(1+w)/(1-w))
// sampled by the midpoint rule on the unit circle.
std::vector<Complex> weeks_nodes(int N, double sigma, double b) {
  std::vector<Complex> nodes;
  for (int j = 0; j < 2 * N; ++j) {
    double th = (j + 0.5) * kPi / N;
    Complex w = std::polar(1.0, th);
    nodes.push_back(sigma + b * (1.0 + w) / (1.0 - w));
  }
  return nodes;
}

std::vector<double> weeks_coefficients(int N, double sigma, double b,
                                       const std::vector<Complex>& F) {
  std::vector<double> a(N, 0.0);
  for (int n = 0; n < N; ++n) {
    Complex acc = 0.0;
    for (int j = 0; j < 2 * N; ++j) {
      double th = (j + 0.5) * kPi / N;
      Complex w = std::polar(1.0, th);
      Complex G = 2.0 * b / (1.0 - w) * F[j];
      acc += G * std::polar(1.0, -n * th);
    }
    a[n] = (acc / static_cast<double>(2 * N)).real();
  }
  (void)sigma;
  return a;
}

double weeks_eval(const std::vector<double>& a, double sigma, double b, double t) {
  // Laguerre recurrence: (n+1)L_{n+1}(x) = (2n+1-x)L_n(x) - n L_{n-1}(x).
  double x = 2.0 * b * t;
  double l0 = 1.0, l1 = 1.0 - x;
  double acc = a.empty() ? 0.0 : a[0] * l0;
  if (a.size() > 1) acc += a[1] * l1;
  for (size_t n = 1; n + 1 < a.size(); ++n) {
    double l2 = ((2.0 * n + 1.0 - x) * l1 - n * l0) / (n + 1.0);
    acc += a[n + 1] * l2;
    l0 = l1;
    l1 = l2;
  }
  return std::exp((sigma - b) * t) * acc;
}

} // namespace

std::vector<Complex> contour_nodes(const ContourSpec& spec, double t) {
  if (spec.method == InversionMethod::Talbot) return talbot_nodes(spec.nodes, t);
  return weeks_nodes(spec.nodes, spec.sigma, spec.b);
}

double invert_from_samples(const ContourSpec& spec, double t,
                           const std::vector<Complex>& values) {
  size_t expected = contour_nodes(spec, t).size();
  if (values.size() != expected)
    throw ContourMismatch("expected " + std::to_string(expected) + " contour samples, got " +
                          std::to_string(values.size()));
  if (spec.method == InversionMethod::Talbot) {
    if (t <= 0.0) return 0.0;
    return talbot_invert(spec.nodes, t, values);
  }
  auto a = weeks_coefficients(spec.nodes, spec.sigma, spec.b, values);
  return weeks_eval(a, spec.sigma, spec.b, t);
}

std::vector<double> invert(const ContourSpec& spec,
                           const std::function<Complex(Complex)>& F,
                           const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    auto nodes = contour_nodes(spec, t);
    std::vector<Complex> vals;
    vals.reserve(nodes.size());
    for (Complex s : nodes) vals.push_back(F(s));
    out.push_back(invert_from_samples(spec, t, vals));
  }
  return out;
}

} // namespace poro
