//
// kernels : oscillatory phase functions and the unit-modulus kernel
//

#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include "ibf/geometry.hpp"

namespace ibf {

using Complex = std::complex<double>;

enum class PhaseVariant : std::uint16_t {
  Nufft1d = 0,  // Phi = -x*xi
  Fio1d = 1,    // Phi = x*xi + c(x)|xi|, c(x) = (2 + sin(2 pi x))/8
  Fio2d = 2,    // Phi = x.xi + sqrt(c1^2 xi1^2 + c2^2 xi2^2)
  Custom = 3,
};

// A phase Phi(x, xi) defining the kernel K = exp(2 pi i Phi). The built-in
// variants fix the dimension; Custom supplies a callable and a dimension.
struct PhaseSpec {
  PhaseVariant variant{PhaseVariant::Nufft1d};
  int dim{1};
  std::function<double(const Point&, const Point&)> custom;

  static PhaseSpec nufft1d();
  static PhaseSpec fio1d();
  static PhaseSpec fio2d();
  static PhaseSpec make_custom(int dim, std::function<double(const Point&, const Point&)> fn);
};

double phase(const PhaseSpec& spec, const Point& x, const Point& xi);
Complex kernel(const PhaseSpec& spec, const Point& x, const Point& xi);

// Recentred phase R(x, xi) = Phi(x,xi) - Phi(cA,xi) - Phi(x,cB) + Phi(cA,cB),
// evaluated as exactly that four-term combination.
double residual_phase(const PhaseSpec& spec, const Point& x, const Point& xi, const Point& c_a,
                      const Point& c_b);

}  // namespace ibf
