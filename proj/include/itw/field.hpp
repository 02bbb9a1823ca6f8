#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "itw/grid.hpp"

namespace itw {

enum class FieldKind { coefficients, point_values };

// A real vector indexed by the grid points, tagged with what it stores:
// expansion coefficients c_alpha or point values f(alpha).
struct Field {
  Field() = default;
  Field(std::shared_ptr<const MultiGrid> g, FieldKind k)
      : grid(std::move(g)), kind(k), v(grid->size(), 0.0) {}

  std::shared_ptr<const MultiGrid> grid;
  FieldKind kind = FieldKind::coefficients;
  std::vector<double> v;

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

inline void require_same_grid(const Field& a, const Field& b) {
  if (a.grid.get() != b.grid.get() || a.v.size() != b.v.size())
    throw std::invalid_argument("fields live on different grids");
}

inline void require_kind(const Field& f, FieldKind k, const char* who) {
  if (f.kind != k)
    throw std::invalid_argument(std::string(who) + ": field has the wrong kind tag");
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scal(double alpha, std::vector<double>& x) {
  for (double& t : x) t *= alpha;
}

}  // namespace itw
