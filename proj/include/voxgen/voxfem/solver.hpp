#pragma once

#include <cstdint>
#include <vector>

#include "voxgen/voxfem/hex8.hpp"
#include "voxgen/voxfem/types.hpp"

namespace voxgen::voxfem {

struct SolverOptions {
  double rel_tol = 1e-6;       // CG convergence: |r| / |f| <= rel_tol
  std::int64_t max_iters = 0;  // 0 means 10 * n_dofs
  int threads = 1;             // threads for the matrix-free apply
};

// Assembles the global load vector (3 DOFs per node) for the problem's loads.
// Entries at fixed DOFs are zeroed to match the eliminated system.
std::vector<double> assemble_loads(const FemProblem& problem);

// Matrix-free linear-elasticity operator K(rho) on the voxel grid with fixed
// DOFs eliminated (zero row/column, unit diagonal). One instance per
// (problem, density) pair; solve() runs Jacobi-preconditioned CG.
class VoxelOperator {
 public:
  VoxelOperator(const FemProblem& problem, const DensityField& density,
                SolverOptions options = {});

  // out = K u. Vectors are full 3*n_nodes dof vectors; u must vanish at fixed
  // DOFs (enforced internally for solve's iterates).
  void apply(const std::vector<double>& u, std::vector<double>& out) const;

  // Solves K u = f. warm_start, when given, seeds the CG iteration.
  DisplacementField solve(const std::vector<double>& f,
                          const DisplacementField* warm_start = nullptr) const;

  const ElementMatrix& ke() const { return ke_; }
  const std::vector<double>& youngs() const { return youngs_; }
  std::int64_t last_iterations() const { return last_iterations_; }

 private:
  const FemProblem& problem_;
  SolverOptions options_;
  ElementMatrix ke_;
  std::vector<double> youngs_;       // E(rho_e) per element
  std::vector<std::uint8_t> fixed_;  // per node
  std::vector<double> diag_;         // Jacobi preconditioner
  mutable std::int64_t last_iterations_ = 0;
};

// Convenience: build the operator and solve in one call.
DisplacementField solve(const FemProblem& problem, const DensityField& density,
                        SolverOptions options = {});

// Compliance c = f^T u.
double compliance(const FemProblem& problem, const DensityField& density,
                  const DisplacementField& u);

// Per-element compliance sum  sum_e E(rho_e) u_e^T K_e u_e  (same quantity as
// f^T u, computed the long way; used as a cross-check).
double compliance_element_sum(const FemProblem& problem, const DensityField& density,
                              const DisplacementField& u);

// Raw per-element strain energy  s_e = 1/2 E(rho_e) u_e^T K_e u_e.
std::vector<double> raw_strain_energy(const FemProblem& problem, const DensityField& density,
                                      const DisplacementField& u);

// Clips the raw energies at the 99.5th percentile and min-max normalizes to
// [0, 1]. An identically-zero field stays zero.
StrainEnergyField strain_energy_field(const FemProblem& problem, const DensityField& density,
                                      const DisplacementField& u);

// u_e^T K_e u_e per element (unit modulus), the kernel shared by compliance,
// sensitivities and strain energy.
std::vector<double> element_strain_terms(const FemProblem& problem, const DisplacementField& u);

}  // namespace voxgen::voxfem
