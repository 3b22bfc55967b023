#pragma once

#include <vector>

#include "voxgen/voxfem/solver.hpp"
#include "voxgen/voxfem/types.hpp"

namespace voxgen::simpgen {

struct SimpConfig {
  double volfrac = 0.3;
  int max_iters = 60;
  double move_limit = 0.2;
  double damping = 0.5;        // OC exponent eta
  double filter_radius = 1.5;  // in element units
  double convergence_tol = 0.01;
  double rho_min = 1e-3;
  voxfem::SolverOptions solver;

  void validate() const {
    if (!(volfrac > 0.0 && volfrac < 1.0))
      throw InvalidArgument("SimpConfig: volfrac must be in (0,1)");
    if (!(filter_radius >= 1.0))
      throw InvalidArgument("SimpConfig: filter_radius must be >= 1");
    if (!(move_limit > 0.0 && move_limit <= 1.0))
      throw InvalidArgument("SimpConfig: move_limit must be in (0,1]");
  }
};

struct BisectionFailure : Error {
  using Error::Error;
};

struct SimpHistory {
  std::vector<double> compliance;
  std::vector<double> volume_fraction;
  std::vector<double> max_change;
};

struct SimpResult {
  voxfem::StrainEnergyField strain_energy;  // at uniform density = volfrac
  voxfem::DensityField density;
  SimpHistory history;
};

// Mesh-independence filter: s_hat_e = sum_i w_ei rho_i s_i / (rho_e sum_i w_ei)
// with conic weights w_ei = max(0, radius - dist(e, i)). Densities must be
// strictly positive.
std::vector<double> sensitivity_filter(const voxfem::GridDims& dims,
                                       const voxfem::DensityField& density,
                                       const std::vector<double>& sens, double radius);

// Optimality-criteria update with bisected Lagrange multiplier. Sensitivities
// must be <= 0. The updated mean density equals cfg.volfrac to 1e-6.
voxfem::DensityField oc_update(const voxfem::DensityField& density,
                               const std::vector<double>& sens, const SimpConfig& cfg);

// Full SIMP loop: solve -> sensitivities -> filter -> OC until the max density
// change drops below cfg.convergence_tol or cfg.max_iters is reached. The
// returned strain-energy field is evaluated at the uniform starting density.
SimpResult run_simp(const voxfem::FemProblem& problem, const SimpConfig& cfg);

}  // namespace voxgen::simpgen
