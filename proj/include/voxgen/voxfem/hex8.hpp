#pragma once

#include <array>

#include "voxgen/voxfem/types.hpp"

namespace voxgen::voxfem {

// 24x24 stiffness matrix of the unit-cube trilinear hexahedron, row-major.
// Local node l = dx + 2*dy + 4*dz over the corner offsets, DOFs (x,y,z)
// interleaved per node.
using ElementMatrix = std::array<double, 24 * 24>;

// Stiffness for unit Young's modulus and the given Poisson ratio, integrated
// with 2x2x2 Gauss quadrature. Scale by E(rho) per element at assembly/apply.
ElementMatrix element_stiffness(const ElasticParams& material);

// K_e * u_e for one element (unit modulus).
inline void element_matvec(const ElementMatrix& ke, const double* ue, double* out) {
  for (int r = 0; r < 24; ++r) {
    const double* row = ke.data() + 24 * r;
    double acc = 0.0;
    for (int c = 0; c < 24; ++c) acc += row[c] * ue[c];
    out[r] = acc;
  }
}

// u_e^T K_e u_e for one element (unit modulus).
inline double element_energy(const ElementMatrix& ke, const double* ue) {
  double acc = 0.0;
  for (int r = 0; r < 24; ++r) {
    const double* row = ke.data() + 24 * r;
    double rowdot = 0.0;
    for (int c = 0; c < 24; ++c) rowdot += row[c] * ue[c];
    acc += ue[r] * rowdot;
  }
  return acc;
}

}  // namespace voxgen::voxfem
