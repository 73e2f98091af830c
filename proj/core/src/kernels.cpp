#include "ibf/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace ibf {

PhaseSpec PhaseSpec::nufft1d() { return {PhaseVariant::Nufft1d, 1, nullptr}; }
PhaseSpec PhaseSpec::fio1d() { return {PhaseVariant::Fio1d, 1, nullptr}; }
PhaseSpec PhaseSpec::fio2d() { return {PhaseVariant::Fio2d, 2, nullptr}; }

PhaseSpec PhaseSpec::make_custom(int dim, std::function<double(const Point&, const Point&)> fn) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("phase dimension must be 1 or 2");
  if (!fn) throw std::invalid_argument("custom phase requires a callable");
  return {PhaseVariant::Custom, dim, std::move(fn)};
}

double phase(const PhaseSpec& spec, const Point& x, const Point& xi) {
  if (x.dim != spec.dim || xi.dim != spec.dim) {
    throw std::invalid_argument("point dimension does not match phase");
  }
  switch (spec.variant) {
    case PhaseVariant::Nufft1d:
      return -x[0] * xi[0];
    case PhaseVariant::Fio1d: {
      const double c = (2.0 + std::sin(kTau * x[0])) / 8.0;
      return x[0] * xi[0] + c * std::abs(xi[0]);
    }
    case PhaseVariant::Fio2d: {
      const double c1 = (2.0 + std::sin(kTau * x[0]) * std::sin(kTau * x[1])) / 32.0;
      const double c2 = (2.0 + std::cos(kTau * x[0]) * std::cos(kTau * x[1])) / 32.0;
      const double dot = x[0] * xi[0] + x[1] * xi[1];
      // The radical vanishes (not NaN) at xi = 0.
      return dot + std::sqrt(c1 * c1 * xi[0] * xi[0] + c2 * c2 * xi[1] * xi[1]);
    }
    case PhaseVariant::Custom:
      return spec.custom(x, xi);
  }
  throw std::logic_error("unknown phase variant");
}

Complex kernel(const PhaseSpec& spec, const Point& x, const Point& xi) {
  return std::polar(1.0, kTau * phase(spec, x, xi));
}

double residual_phase(const PhaseSpec& spec, const Point& x, const Point& xi, const Point& c_a,
                      const Point& c_b) {
  return phase(spec, x, xi) - phase(spec, c_a, xi) - phase(spec, x, c_b) + phase(spec, c_a, c_b);
}

}  // namespace ibf
