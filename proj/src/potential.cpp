#include "kgfock/potential.hpp"

#include <cmath>
#include <memory>

#include "kgfock/errors.hpp"

namespace kgfock {

Potential zero_potential() {
  return Potential{"zero", [](double) { return 0.0; }, [](double) { return Complex(0.0, 0.0); }, true};
}

Potential gaussian_potential(double amplitude, double width) {
  if (!(width > 0.0)) throw ParameterError("gaussian width must be positive");
  if (amplitude == 0.0) return zero_potential();
  const double norm = amplitude * width * std::sqrt(2.0 * kPi);
  return Potential{"gaussian",
                   [=](double x) { return amplitude * std::exp(-x * x / (2.0 * width * width)); },
                   [=](double k) { return Complex(norm * std::exp(-0.5 * width * width * k * k), 0.0); },
                   false};
}

Potential lorentzian_potential(double amplitude, double width) {
  if (!(width > 0.0)) throw ParameterError("lorentzian width must be positive");
  if (amplitude == 0.0) return zero_potential();
  return Potential{"lorentzian",
                   [=](double x) { return amplitude / (1.0 + (x / width) * (x / width)); },
                   [=](double k) { return Complex(amplitude * width * kPi * std::exp(-width * std::abs(k)), 0.0); },
                   false};
}

Potential scaled(const Potential& base, double factor) {
  if (factor == 0.0 || base.identically_zero) return zero_potential();
  auto v = base.value;
  auto f = base.fourier;
  return Potential{base.label, [=](double x) { return factor * v(x); }, [=](double k) { return factor * f(k); }, false};
}

Potential sampled_potential(std::vector<double> samples, double x0, double dx, std::string label) {
  if (samples.empty()) throw ParameterError("sampled potential needs at least one sample");
  if (!(dx > 0.0)) throw ParameterError("sample spacing must be positive");
  bool all_zero = true;
  for (double s : samples) all_zero = all_zero && s == 0.0;
  if (all_zero) return zero_potential();
  auto table = std::make_shared<const std::vector<double>>(std::move(samples));
  auto value = [=](double x) {
    const double pos = (x - x0) / dx;
    const long i = std::lround(pos);
    if (i < 0 || i >= static_cast<long>(table->size())) return 0.0;
    return (*table)[static_cast<std::size_t>(i)];
  };
  auto fourier = [=](double k) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < table->size(); ++i) {
      const double x = x0 + static_cast<double>(i) * dx;
      re += (*table)[i] * std::cos(k * x);
      im -= (*table)[i] * std::sin(k * x);
    }
    return Complex(re * dx, im * dx);
  };
  return Potential{std::move(label), value, fourier, false};
}

Potential make_potential(const std::string& kind, double amplitude, double width) {
  if (kind == "zero") return zero_potential();
  if (kind == "gaussian") return gaussian_potential(amplitude, width);
  if (kind == "lorentzian") return lorentzian_potential(amplitude, width);
  throw ParameterError("unknown potential kind '" + kind + "' (expected zero, gaussian or lorentzian)");
}

}  // namespace kgfock
