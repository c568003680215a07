// Copyright 2026 The noisybound Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noisybound/noise_channels.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace noisybound {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Norm DefaultNorm(NoiseKind kind) {
  return kind == NoiseKind::kLaplace ? Norm::kL1 : Norm::kL2;
}

void CheckScale(double m) {
  if (!(m > 0.0) || std::isnan(m)) {
    throw std::invalid_argument("noise magnitude m must be positive");
  }
}

// log density of m*N at x; -inf outside the support.
double LogDensity(NoiseKind kind, double x, double m) {
  switch (kind) {
    case NoiseKind::kGaussian: {
      const double z = x / m;
      return -0.5 * z * z - std::log(m) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    case NoiseKind::kLaplace:
      return -std::abs(x) / m - std::log(2.0 * m);
    case NoiseKind::kUniform:
      return std::abs(x) <= m ? -std::log(2.0 * m) : -kInf;
  }
  return -kInf;
}

// Integrand of D_f(P || Q) for P = law(mN), Q = law(shift + mN).
double Integrand(DivergenceKind f, NoiseKind kind, double x, double shift,
                 double m) {
  const double lp = LogDensity(kind, x, m);
  const double lq = LogDensity(kind, x - shift, m);
  switch (f) {
    case DivergenceKind::kKL:
      if (lp == -kInf) return 0.0;
      return std::exp(lp) * (lp - lq);
    case DivergenceKind::kChi2:
      if (lp == -kInf) return 0.0;
      return std::exp(2.0 * lp - lq);
    case DivergenceKind::kTV:
      return 0.5 * std::abs(std::exp(lp) - std::exp(lq));
  }
  return 0.0;
}

// Composite Simpson on [a, b], doubling the number of panels until successive
// estimates agree.
double SimpsonDoubling(DivergenceKind f, NoiseKind kind, double shift, double m,
                       double a, double b, const QuadratureSpec& spec) {
  int n = std::max(2, spec.initial_intervals);
  double h = (b - a) / n;
  // Endpoints sit on support edges for the uniform family, so they are
  // evaluated just inside the panel to take the one-sided limit.
  const double nudge = 1e-12 * (b - a);
  double ends = Integrand(f, kind, a + nudge, shift, m) +
                Integrand(f, kind, b - nudge, shift, m);
  double inner = 0.0;
  for (int i = 1; i < n; ++i) inner += Integrand(f, kind, a + i * h, shift, m);
  double trap = h * (0.5 * ends + inner);
  double simpson = 0.0;
  bool have_simpson = false;
  for (int level = 0; level < spec.max_doublings; ++level) {
    double mid = 0.0;
    for (int i = 0; i < n; ++i) {
      mid += Integrand(f, kind, a + (i + 0.5) * h, shift, m);
    }
    const double trap2 = 0.5 * trap + 0.5 * h * mid;
    const double simpson2 = (4.0 * trap2 - trap) / 3.0;
    if (have_simpson &&
        std::abs(simpson2 - simpson) <=
            spec.tolerance * std::max(1.0, std::abs(simpson2))) {
      return simpson2;
    }
    simpson = simpson2;
    have_simpson = true;
    trap = trap2;
    n *= 2;
    h *= 0.5;
  }
  throw std::runtime_error("divergence quadrature did not converge on [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");
}

}  // namespace

NoiseModel::NoiseModel(NoiseKind kind) : kind_(kind), norm_(DefaultNorm(kind)) {}

NoiseModel::NoiseModel(NoiseKind kind, Norm norm) : kind_(kind), norm_(norm) {
  if (kind == NoiseKind::kGaussian && norm != Norm::kL2) {
    throw std::invalid_argument("Gaussian noise pairs with the L2 norm");
  }
  if (kind == NoiseKind::kLaplace && norm != Norm::kL1) {
    throw std::invalid_argument("Laplace noise pairs with the L1 norm");
  }
}

std::string_view ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kLaplace: return "laplace";
    case NoiseKind::kUniform: return "uniform";
  }
  return "?";
}

std::string_view ToString(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kKL: return "kl";
    case DivergenceKind::kTV: return "tv";
    case DivergenceKind::kChi2: return "chi2";
  }
  return "?";
}

std::string_view ToString(Exactness e) {
  return e == Exactness::kExact ? "exact" : "upper_bound";
}

NoiseKind ParseNoiseKind(std::string_view s) {
  if (s == "gaussian") return NoiseKind::kGaussian;
  if (s == "laplace") return NoiseKind::kLaplace;
  if (s == "uniform") return NoiseKind::kUniform;
  throw std::invalid_argument("unknown noise kind '" + std::string(s) + "'");
}

DivergenceKind ParseDivergenceKind(std::string_view s) {
  if (s == "kl") return DivergenceKind::kKL;
  if (s == "tv") return DivergenceKind::kTV;
  if (s == "chi2") return DivergenceKind::kChi2;
  throw std::invalid_argument("unknown divergence '" + std::string(s) + "'");
}

double GaussianCcdf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

ChannelValue Delta(const NoiseModel& noise, double A, double m) {
  CheckScale(m);
  if (!(A >= 0.0)) throw std::invalid_argument("A must be nonnegative");
  if (std::isinf(A)) {
    return {1.0, noise.kind() == NoiseKind::kLaplace ? Exactness::kUpperBound
                                                     : Exactness::kExact};
  }
  switch (noise.kind()) {
    case NoiseKind::kGaussian:
      return {1.0 - 2.0 * GaussianCcdf(A / (2.0 * m)), Exactness::kExact};
    case NoiseKind::kLaplace:
      return {-std::expm1(-A / m), Exactness::kUpperBound};
    case NoiseKind::kUniform:
      return {std::min(1.0, A / (2.0 * m)), Exactness::kExact};
  }
  throw std::invalid_argument("unsupported noise kind");
}

ChannelValue Cost(DivergenceKind f, const NoiseModel& noise,
                  std::span<const double> x, std::span<const double> x_prime,
                  double m) {
  CheckSameSize(x, x_prime);
  CheckScale(m);
  switch (noise.kind()) {
    case NoiseKind::kGaussian: {
      double d2 = 0.0;
      for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_prime[i];
        d2 += d * d;
      }
      switch (f) {
        case DivergenceKind::kKL:
          return {d2 / (2.0 * m * m), Exactness::kExact};
        case DivergenceKind::kChi2:
          return {std::expm1(d2 / (m * m)), Exactness::kExact};
        case DivergenceKind::kTV:
          return {std::min(1.0, std::sqrt(d2) / (2.0 * m)),
                  Exactness::kUpperBound};
      }
      break;
    }
    case NoiseKind::kLaplace: {
      const double d1 = DistanceOf(x, x_prime, Norm::kL1) / m;
      switch (f) {
        case DivergenceKind::kKL:
          return {d1, Exactness::kUpperBound};
        case DivergenceKind::kChi2:
          return {std::expm1(d1), Exactness::kUpperBound};
        case DivergenceKind::kTV:
          return {std::min(1.0, std::sqrt(d1 / 2.0)), Exactness::kUpperBound};
      }
      break;
    }
    case NoiseKind::kUniform: {
      if (x.size() != 1) {
        throw std::invalid_argument(
            "uniform noise costs are defined for dimension 1 only");
      }
      const double d = std::abs(x[0] - x_prime[0]);
      if (f == DivergenceKind::kTV) {
        return {std::min(1.0, d / (2.0 * m)), Exactness::kExact};
      }
      return {d == 0.0 ? 0.0 : kInf, Exactness::kExact};
    }
  }
  throw std::invalid_argument("unsupported noise/divergence combination");
}

ChannelValue Cost1d(DivergenceKind f, const NoiseModel& noise, double shift,
                    double m) {
  const double zero = 0.0;
  return Cost(f, noise, std::span<const double>(&zero, 1),
              std::span<const double>(&shift, 1), m);
}

double CostExact1d(DivergenceKind f, const NoiseModel& noise, double shift,
                   double m) {
  CheckScale(m);
  const double v = std::abs(shift / m);
  switch (noise.kind()) {
    case NoiseKind::kGaussian:
      switch (f) {
        case DivergenceKind::kKL: return 0.5 * v * v;
        case DivergenceKind::kChi2: return std::expm1(v * v);
        case DivergenceKind::kTV: return 1.0 - 2.0 * GaussianCcdf(v / 2.0);
      }
      break;
    case NoiseKind::kLaplace:
      switch (f) {
        case DivergenceKind::kKL: return v + std::expm1(-v);
        case DivergenceKind::kChi2:
          return (2.0 / 3.0) * std::exp(v) + (1.0 / 3.0) * std::exp(-2.0 * v) -
                 1.0;
        case DivergenceKind::kTV:
          throw std::domain_error("no exact form recorded for Laplace TV");
      }
      break;
    case NoiseKind::kUniform:
      if (f == DivergenceKind::kTV) return std::min(1.0, v / 2.0);
      return v == 0.0 ? 0.0 : kInf;
  }
  throw std::domain_error("no exact form for this combination");
}

double OracleDivergence1d(DivergenceKind f, const NoiseModel& noise,
                          double shift, double m, const QuadratureSpec& spec) {
  CheckScale(m);
  if (!std::isfinite(shift)) throw std::invalid_argument("shift must be finite");
  const NoiseKind kind = noise.kind();
  const double lo = std::min(0.0, shift) - spec.range_scale_units * m;
  const double hi = std::max(0.0, shift) + spec.range_scale_units * m;

  // Kinks and jumps of the integrand: density centers (Laplace), support
  // edges (Uniform) and the crossing point of the two densities (TV).
  std::vector<double> cuts = {lo, hi, 0.0, shift, 0.5 * shift};
  if (kind == NoiseKind::kUniform) {
    cuts.insert(cuts.end(), {-m, m, shift - m, shift + m});
  }
  std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (f != DivergenceKind::kTV) {
      // Mass of P where Q has none makes KL and chi^2 infinite.
      const double mid = 0.5 * (a + b);
      if (LogDensity(kind, mid, m) > -kInf &&
          LogDensity(kind, mid - shift, m) == -kInf) {
        return kInf;
      }
    }
    total += SimpsonDoubling(f, kind, shift, m, a, b, spec);
  }
  if (f == DivergenceKind::kChi2) total -= 1.0;
  return std::max(0.0, total);
}

std::vector<double> SampleNoise(const NoiseModel& noise, size_t dim, Rng& rng) {
  std::vector<double> out(dim);
  switch (noise.kind()) {
    case NoiseKind::kGaussian: {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (double& x : out) x = dist(rng);
      break;
    }
    case NoiseKind::kLaplace: {
      std::exponential_distribution<double> magnitude(1.0);
      std::bernoulli_distribution negative(0.5);
      for (double& x : out) {
        const double e = magnitude(rng);
        x = negative(rng) ? -e : e;
      }
      break;
    }
    case NoiseKind::kUniform: {
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (double& x : out) x = dist(rng);
      break;
    }
  }
  return out;
}

}  // namespace noisybound
