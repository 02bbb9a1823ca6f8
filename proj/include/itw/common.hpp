#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace itw {

using index_t = std::ptrdiff_t;

// Thrown when an iterative solver exhausts its budget.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
  double best_residual() const {
    double b = residual_history.empty() ? -1.0 : residual_history.front();
    for (double r : residual_history)
      if (r < b) b = r;
    return b;
  }
};

// Textual input (grid notation, config, parameter files) rejected with a location.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t where)
      : std::runtime_error(what + " (at position " + std::to_string(where) + ")"),
        position(where) {}
  std::size_t position;
};

inline int floor_div2(int a) { return (a >= 0) ? a / 2 : -((-a + 1) / 2); }
inline int ceil_div2(int a) { return -floor_div2(-a); }

inline int ipow2(int p) {
  if (p < 0) throw std::invalid_argument("ipow2: negative exponent");
  return 1 << p;
}

// 2^p as double, p may be negative
inline double dpow2(int p) { return std::ldexp(1.0, p); }

}  // namespace itw
