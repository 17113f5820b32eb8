#pragma once

// Shared fixtures and a small seeded generator for property tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "momlab/convexlab.hpp"
#include "momlab/grid.hpp"
#include "momlab/measures.hpp"

namespace momlab::testing {

inline Field sample(const Grid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) v[k] = f(g.node(k)[0]);
  return Field(g, std::move(v));
}

inline Field sample2(const Grid& g, const std::function<double(double, double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point p = g.node(k);
    v[k] = f(p[0], p[1]);
  }
  return Field(g, std::move(v));
}

inline Potential potential(const Grid& g, const std::function<double(double)>& f) {
  return Potential(sample(g, f));
}

inline Density density(const Grid& g, const std::function<double(double)>& f) {
  return Density::normalized(sample(g, f));
}

inline Density gaussian(const Grid& g, double mean = 0.0, double sd = 1.0) {
  return density(g, [=](double x) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z);
  });
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_); }
  /// Smooth random function: a few random sinusoids and a random quadratic.
  std::function<double(double)> smooth_function() {
    const double a0 = uniform(-1, 1), a1 = uniform(-1, 1), a2 = uniform(-0.3, 0.3);
    std::vector<double> amp(3), freq(3), ph(3);
    for (int i = 0; i < 3; ++i) {
      amp[i] = uniform(-1, 1);
      freq[i] = uniform(0.2, 2.0);
      ph[i] = uniform(0, 6.283185307179586);
    }
    return [=](double x) {
      double s = a0 + a1 * x + a2 * x * x;
      for (int i = 0; i < 3; ++i) s += amp[i] * std::sin(freq[i] * x + ph[i]);
      return s;
    };
  }
  /// Random density on g: a mixture of two or three bumps.
  Density random_density(const Grid& g, double spread) {
    const int m = 2 + static_cast<int>(index(2));
    std::vector<double> mu(m), sd(m), w(m);
    for (int i = 0; i < m; ++i) {
      mu[i] = uniform(-spread, spread);
      sd[i] = uniform(0.3, 1.2);
      w[i] = uniform(0.2, 1.0);
    }
    return density(g, [=](double x) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) {
        const double z = (x - mu[i]) / sd[i];
        s += w[i] * std::exp(-0.5 * z * z) / sd[i];
      }
      return s;
    });
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace momlab::testing
