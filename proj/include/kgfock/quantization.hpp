#pragma once

#include "kgfock/potential.hpp"
#include "kgfock/types.hpp"

namespace kgfock {

// Periodic grid x_i = x0 + i dx, i = 0..points-1.
struct PhaseSpaceGrid {
  int points = 0;
  double dx = 0.0;
  double x0 = 0.0;
  double mass = 1.0;
  RVector v_samples;
};

// Centered grid of the given length with V sampled at the nodes.
PhaseSpaceGrid make_phase_space_grid(int points, double length, double mass, const Potential& potential);

// Real vectors of size 4G are ordered (Re pi, Im pi, Re phi, Im phi).
struct RealGenerator {
  RMatrix matrix;
  RMatrix metric;      // Gram matrix of the energy form, dx-weighted
  RMatrix symplectic;  // Re omega, dx-weighted
  double delta = 0.0;
};

struct KahlerStructure {
  RMatrix j;
  RMatrix h;
  RMatrix symplectic;
  CMatrix dyn_gram;  // dyn(y1, y2) = y1^T dyn_gram y2
  RVector h_spectrum;  // ascending
};

// Real symmetric matrix of eps^power = (-Delta + m^2)^{power/2} with the FFT Laplacian.
RMatrix dispersion_power(const PhaseSpaceGrid& grid, double power);

double positivity_margin(const PhaseSpaceGrid& grid);
RealGenerator build_generator(const PhaseSpaceGrid& grid);
KahlerStructure polar_decompose(const RealGenerator& generator);
Complex dyn_inner(const KahlerStructure& ks, const RVector& y1, const RVector& y2);

struct FreeImage {
  CVector first;
  CVector second;
};

FreeImage free_identification(const PhaseSpaceGrid& grid, const RVector& y);
RVector time_reversal(const RVector& y);
// diag(-1, 1, 1, -1) in the block ordering above.
RMatrix time_reversal_matrix(int points);

struct QuantizationReport {
  double delta = 0.0;
  double min_spec_hV = 0.0;
  double j_square_residual = 0.0;
  double reconstruction_residual = 0.0;
  double free_check_error = 0.0;
  double antisymmetry_residual = 0.0;
};

QuantizationReport quantize(const PhaseSpaceGrid& grid);

}  // namespace kgfock
