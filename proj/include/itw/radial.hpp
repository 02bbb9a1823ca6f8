#pragma once

#include "itw/pointeval.hpp"

namespace itw {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(std::size_t(n), 0.0);
  w.assign(std::size_t(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[std::size_t(i)] = -t;
    x[std::size_t(n - 1 - i)] = t;
    w[std::size_t(i)] = w[std::size_t(n - 1 - i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

struct RadialSample {
  double r = 0.0;
  double fbar = 0.0;  // (1/4pi) angular average
  double gbar = 0.0;  // s-type radial estimate, 2 sqrt(pi) fbar
  bool truncated = false;
};

// Angular average over spheres by a product rule: Gauss-Legendre in cos(theta)
// times a uniform phi grid.
inline std::vector<RadialSample> radial_average(const PointEvaluator& f,
                                                std::array<double, 3> center,
                                                const std::vector<double>& radii,
                                                int n_theta = 16, int n_phi = 32) {
  std::vector<double> ct, wt;
  gauss_legendre(n_theta, ct, wt);
  auto ext = f.extent_bohr();
  std::vector<RadialSample> out;
  out.reserve(radii.size());
  for (double r : radii) {
    RadialSample s;
    s.r = r;
    s.truncated = (std::abs(center[0]) + r > ext[0]) || (std::abs(center[1]) + r > ext[1]) ||
                  (std::abs(center[2]) + r > ext[2]);
    double acc = 0.0;
    for (int i = 0; i < n_theta; ++i) {
      double cth = ct[std::size_t(i)];
      double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
      double ring = 0.0;
      for (int k = 0; k < n_phi; ++k) {
        double phi = 2.0 * M_PI * k / n_phi;
        ring += f(center[0] + r * sth * std::cos(phi), center[1] + r * sth * std::sin(phi),
                  center[2] + r * cth);
      }
      acc += wt[std::size_t(i)] * ring;
    }
    // (1/4pi) * sum w_i (2pi/nphi) ring = sum / (2 nphi)
    s.fbar = acc / (2.0 * n_phi);
    s.gbar = 2.0 * std::sqrt(M_PI) * s.fbar;
    out.push_back(s);
  }
  return out;
}

// Analytic hydrogenic orbitals (Z = 1) for excited-state labeling.
inline double hydrogen_1s(double x, double y, double z) {
  double r = std::sqrt(x * x + y * y + z * z);
  return std::exp(-r) / std::sqrt(M_PI);
}
inline double hydrogen_2s(double x, double y, double z) {
  double r = std::sqrt(x * x + y * y + z * z);
  return (2.0 - r) * std::exp(-0.5 * r) / std::sqrt(32.0 * M_PI);
}
inline double hydrogen_2p(int axis, double x, double y, double z) {
  double r = std::sqrt(x * x + y * y + z * z);
  double comp = axis == 0 ? x : axis == 1 ? y : z;
  return comp * std::exp(-0.5 * r) / std::sqrt(32.0 * M_PI);
}

}  // namespace itw
