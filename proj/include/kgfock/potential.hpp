#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kgfock/types.hpp"

namespace kgfock {

// Real function of position together with its Fourier transform fhat(k) = int e^{-ikx} f(x) dx.
// Used both for the external potential V and for the spatial cutoff g.
struct Potential {
  std::string label;
  std::function<double(double)> value;
  std::function<Complex(double)> fourier;
  bool identically_zero = false;

  Complex derivative_fourier(double k) const { return Complex(0.0, k) * fourier(k); }
};

Potential zero_potential();
// amplitude * exp(-x^2 / (2 width^2))
Potential gaussian_potential(double amplitude, double width);
// amplitude / (1 + (x / width)^2)
Potential lorentzian_potential(double amplitude, double width);
Potential scaled(const Potential& base, double factor);
// Samples f(x0 + i dx), i = 0..n-1. The transform is the exact trigonometric sum of the table.
Potential sampled_potential(std::vector<double> samples, double x0, double dx, std::string label = "sampled");

// Builds one of the built-in kinds: "zero", "gaussian", "lorentzian".
Potential make_potential(const std::string& kind, double amplitude, double width);

}  // namespace kgfock
