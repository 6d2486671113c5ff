#include "quench/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "quench/error.hpp"

namespace quench {

namespace {

bool beta_in_range(double beta) { return beta > 2.0 && beta < 3.0; }

// Second derivative of the piecewise data through three (possibly unevenly
// spaced) samples.
double three_point_second_difference(const std::pair<double, double>& left,
                                     const std::pair<double, double>& mid,
                                     const std::pair<double, double>& right) {
  const double hl = mid.first - left.first;
  const double hr = right.first - mid.first;
  return 2.0 * (hl * right.second - (hl + hr) * mid.second + hr * left.second) / (hl * hr * (hl + hr));
}

}  // namespace

InitialData InitialData::zero(double a) {
  InitialData d;
  d.kind = InitialKind::zero;
  d.a = a;
  return d;
}

InitialData InitialData::parabolic(double a) {
  InitialData d;
  d.kind = InitialKind::parabolic;
  d.a = a;
  return d;
}

InitialData InitialData::sampled(std::vector<std::pair<double, double>> samples, double a, double b) {
  InitialData d;
  d.kind = InitialKind::sampled;
  d.a = a;
  d.b = b;
  d.samples = std::move(samples);
  return d;
}

double InitialData::value(double r, double R) const {
  switch (kind) {
    case InitialKind::zero:
      return 0.0;
    case InitialKind::parabolic:
      return a * (1.0 - (r / R) * (r / R));
    case InitialKind::sampled: {
      if (samples.empty()) throw InvalidArgument("incomplete profile: no samples");
      const double slack = 1e-12 * std::max(1.0, R);
      if (r < samples.front().first - slack || r > samples.back().first + slack) {
        throw InvalidArgument(fmt::format("incomplete profile: r = {} outside sampled range", r));
      }
      auto hi = std::lower_bound(samples.begin(), samples.end(), r,
                                 [](const auto& s, double x) { return s.first < x; });
      if (hi == samples.begin()) return hi->second;
      if (hi == samples.end()) return samples.back().second;
      auto lo = std::prev(hi);
      const double w = (r - lo->first) / (hi->first - lo->first);
      return (1.0 - w) * lo->second + w * hi->second;
    }
  }
  return 0.0;
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::zero: return "zero";
    case InitialKind::parabolic: return "parabolic";
    case InitialKind::sampled: return "sampled";
  }
  return "unknown";
}

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::lemma7: return "lemma7";
    case Hypothesis::theorem8: return "theorem8";
    case Hypothesis::theorem9: return "theorem9";
  }
  return "unknown";
}

void check_params(const ProblemParams& p) {
  if (p.n < 1) throw InvalidArgument(fmt::format("dimension n must be >= 1, got {}", p.n));
  if (!(std::isfinite(p.R) && p.R > 0.0)) throw InvalidArgument(fmt::format("radius R must be > 0, got {}", p.R));
  if (!(std::isfinite(p.lambda) && p.lambda >= 0.0)) {
    throw InvalidArgument(fmt::format("lambda must be >= 0, got {}", p.lambda));
  }
  if (!(std::isfinite(p.chi) && p.chi >= 0.0)) throw InvalidArgument(fmt::format("chi must be >= 0, got {}", p.chi));
  if (!std::isfinite(p.initial.a) || !std::isfinite(p.initial.b)) {
    throw InvalidArgument("initial data constants a, b must be finite");
  }
}

InitialDataCheck validate_initial_data(const ProblemParams& p, Hypothesis mode) {
  check_params(p);
  const InitialData& u0 = p.initial;
  const double R = p.R;
  InitialDataCheck out;

  if (!(u0.a > 0.0 && u0.a < 1.0)) out.violations.push_back(fmt::format("a = {} not in (0, 1)", u0.a));
  if (u0.b < 0.0) out.violations.push_back(fmt::format("b = {} is negative", u0.b));

  // Normalize every kind to the quantities the hypotheses talk about.
  double sup = 0.0;
  double inf = 0.0;
  double boundary_value = 0.0;
  double boundary_slope = 0.0;
  bool monotone = true;
  double max_second = 0.0;

  switch (u0.kind) {
    case InitialKind::zero:
      break;
    case InitialKind::parabolic:
      sup = u0.a;
      boundary_slope = -2.0 * u0.a / R;
      max_second = -2.0 * u0.a / (R * R);
      monotone = u0.a >= 0.0;
      break;
    case InitialKind::sampled: {
      const auto& s = u0.samples;
      const double slack = 1e-12 * std::max(1.0, R);
      if (s.size() < 3 || std::abs(s.front().first) > slack || std::abs(s.back().first - R) > slack) {
        throw InvalidArgument("incomplete profile: samples must cover [0, R] with at least 3 points");
      }
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i].first > s[i - 1].first)) throw InvalidArgument("incomplete profile: radii must increase strictly");
      }
      sup = s.front().second;
      inf = s.front().second;
      for (const auto& [r, v] : s) {
        sup = std::max(sup, v);
        inf = std::min(inf, v);
      }
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].second > s[i - 1].second) monotone = false;
      }
      max_second = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        max_second = std::max(max_second, three_point_second_difference(s[i - 1], s[i], s[i + 1]));
      }
      const auto n = s.size();
      boundary_value = s[n - 1].second;
      boundary_slope = (s[n - 1].second - s[n - 2].second) / (s[n - 1].first - s[n - 2].first);
      break;
    }
  }
  if (u0.kind == InitialKind::parabolic) inf = 0.0;

  out.boundary_slope_negative = boundary_slope < 0.0;

  if (sup > u0.a) out.violations.push_back(fmt::format("sup u0 = {} exceeds a = {}", sup, u0.a));
  if (inf < -u0.b) out.violations.push_back(fmt::format("inf u0 = {} below -b = {}", inf, -u0.b));
  if (inf < 0.0) out.violations.push_back(fmt::format("u0 is negative somewhere (min {})", inf));

  if (mode == Hypothesis::theorem8 || mode == Hypothesis::theorem9) {
    if (!monotone) out.violations.push_back("not monotone decreasing");
  }
  if (mode == Hypothesis::theorem9) {
    if (std::abs(boundary_value) > 1e-12) {
      out.violations.push_back(fmt::format("u0(R) = {} is not zero", boundary_value));
    }
    const double c1 = -max_second;
    if (c1 > 0.0) {
      out.c1 = c1;
    } else {
      out.violations.push_back(fmt::format("not uniformly concave (max u0'' = {})", max_second));
    }
  }
  return out;
}

double unit_sphere_area(int n) {
  const double half = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double ball_volume(int n, double R) { return unit_sphere_area(n) * std::pow(R, n) / static_cast<double>(n); }

double c0_of(double lambda, double delta1, int n, double R) {
  return 1.0 - 2.0 * static_cast<double>(n) / (lambda * delta1 * R * R);
}

std::optional<double> quench_time_upper_bound(double lambda, double delta1, int n, double R) {
  if (!(lambda > 0.0 && delta1 > 0.0 && R > 0.0 && n >= 1)) return std::nullopt;
  if (!(lambda > 2.0 * static_cast<double>(n) / (delta1 * R * R))) return std::nullopt;
  return 1.0 / (lambda * delta1 * c0_of(lambda, delta1, n, R));
}

double supersolution_psi(double r, double t, double lambda, double delta1, double c0, double R) {
  return 1.0 - lambda * delta1 * c0 * t * (1.0 - (r / R) * (r / R));
}

std::optional<double> delta1_bound(double epsilon, double chi, double beta, int n, double R) {
  if (!beta_in_range(beta) || !(epsilon > 0.0) || !(chi >= 0.0) || n < 1 || !(R > 0.0)) return std::nullopt;
  const double dn = static_cast<double>(n);
  const double integral_bound =
      unit_sphere_area(n) * std::pow(2.0 / epsilon, 1.0 / beta) / (dn - 2.0 / beta) * std::pow(R, dn - 2.0 / beta);
  const double base = 1.0 + chi * integral_bound;
  return 1.0 / (base * base);
}

std::optional<double> epsilon_budget(double c1, double a, double c2, double beta) {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(a > 0.0 && a < 1.0) || !beta_in_range(beta)) return std::nullopt;
  return beta * std::min(c1 * std::pow(1.0 - a, beta - 1.0), c2);
}

std::optional<double> lambda0_threshold(double epsilon, double beta, double delta1, int n) {
  if (!beta_in_range(beta) || !(delta1 > 0.0) || !(epsilon > 0.0) || n < 1) return std::nullopt;
  return 2.0 * epsilon * static_cast<double>(n) * (beta - 1.0) / (beta * (3.0 - beta) * delta1);
}

double lambda1_threshold(double lambda0, double delta1, int n, double R) {
  return std::max({lambda0, 4.0 * static_cast<double>(n) / (delta1 * R * R), 3.0 / delta1});
}

std::optional<BoundSet> select_constants(const ConstantChainInput& in, double lambda) {
  const auto limit = epsilon_budget(in.c1, in.a, in.c2, in.beta);
  if (!limit) return std::nullopt;

  BoundSet bs;
  bs.epsilon_limit = *limit;
  double eps = kEpsilonSafety * *limit;
  std::optional<double> d1;
  int halvings = 0;
  for (;; ++halvings) {
    d1 = delta1_bound(eps, in.chi, in.beta, in.n, in.R);
    if (!d1) return std::nullopt;
    if (in.A0 > *d1) break;
    if (halvings == kMaxEpsilonHalvings) return std::nullopt;
    eps *= 0.5;
  }
  bs.epsilon = eps;
  bs.delta1 = *d1;
  bs.epsilon_halvings = halvings;

  const auto l0 = lambda0_threshold(eps, in.beta, bs.delta1, in.n);
  if (!l0) return std::nullopt;
  bs.lambda0 = *l0;
  bs.lambda1 = lambda1_threshold(bs.lambda0, bs.delta1, in.n, in.R);
  bs.c0 = c0_of(lambda, bs.delta1, in.n, in.R);
  bs.t_upper = quench_time_upper_bound(lambda, bs.delta1, in.n, in.R);
  return bs;
}

}  // namespace quench
