#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "voxgen/common.hpp"

namespace voxgen::voxfem {

// Element counts of the regular voxel grid. Nodes are the (nx+1)(ny+1)(nz+1)
// voxel corners. Both elements and nodes are numbered x-fastest.
struct GridDims {
  int nx = 0, ny = 0, nz = 0;

  std::int64_t n_elems() const {
    return std::int64_t(nx) * ny * nz;
  }
  std::int64_t n_nodes() const {
    return std::int64_t(nx + 1) * (ny + 1) * (nz + 1);
  }
  std::int64_t n_dofs() const { return 3 * n_nodes(); }

  std::int64_t node_id(int x, int y, int z) const {
    return x + std::int64_t(nx + 1) * (y + std::int64_t(ny + 1) * z);
  }
  std::int64_t elem_id(int x, int y, int z) const {
    return x + std::int64_t(nx) * (y + std::int64_t(ny) * z);
  }
  void node_coords(std::int64_t node, int& x, int& y, int& z) const {
    x = int(node % (nx + 1));
    y = int((node / (nx + 1)) % (ny + 1));
    z = int(node / (std::int64_t(nx + 1) * (ny + 1)));
  }
  bool node_in_grid(std::int64_t node) const {
    return node >= 0 && node < n_nodes();
  }
  bool operator==(const GridDims&) const = default;
};

struct ElasticParams {
  double youngs_solid = 1.0;
  double youngs_void = 1e-9;
  double poisson = 0.3;
  double penalty = 3.0;

  // SIMP stiffness interpolation E(rho) = E_void + rho^p (E_solid - E_void).
  double youngs(double rho) const {
    double rp = rho;
    if (penalty == 3.0) {
      rp = rho * rho * rho;
    } else {
      rp = std::pow(rho, penalty);
    }
    return youngs_void + rp * (youngs_solid - youngs_void);
  }
  double dyoungs_drho(double rho) const {
    return penalty * std::pow(rho, penalty - 1.0) * (youngs_solid - youngs_void);
  }

  void validate() const {
    if (!(youngs_void > 0.0 && youngs_void < youngs_solid))
      throw InvalidArgument("ElasticParams: require 0 < youngs_void < youngs_solid");
    if (!(poisson >= 0.0 && poisson < 0.5))
      throw InvalidArgument("ElasticParams: require 0 <= poisson < 0.5");
    if (!(penalty >= 1.0))
      throw InvalidArgument("ElasticParams: require penalty >= 1");
  }
};

enum class LoadKind : std::uint8_t { NodalForce = 0, SurfaceForce = 1, Pressure = 2, Moment = 3 };

constexpr int kNumLoadKinds = 4;

// An axis-aligned rectangular node patch on one of the six grid faces.
// axis selects the face normal (0=x, 1=y, 2=z), side the low/high face.
// (u0..u1, v0..v1) are inclusive node coordinates along the two remaining
// axes in ascending axis order.
struct FacePatch {
  int axis = 0;
  int side = 0;
  int u0 = 0, u1 = 0;
  int v0 = 0, v1 = 0;
};

struct LoadSpec {
  LoadKind kind = LoadKind::NodalForce;
  std::int64_t node = -1;  // NodalForce target
  FacePatch patch;         // SurfaceForce / Pressure / Moment target
  double magnitude = 1.0;
  std::array<double, 3> direction = {0.0, 0.0, -1.0};  // ignored for Pressure
};

struct FemProblem {
  GridDims dims;
  std::vector<std::int64_t> fixed_nodes;  // all 3 DOFs constrained
  std::vector<LoadSpec> loads;
  ElasticParams material;

  void validate() const;
};

// Throws InvalidArgument unless the points span at least a plane's worth of
// directions, i.e. the centered coordinate matrix has rank >= 2.
bool nodes_non_collinear(const GridDims& dims, const std::vector<std::int64_t>& nodes);

template <typename T>
struct GridField {
  GridDims dims;
  std::vector<T> values;  // x-fastest

  GridField() = default;
  GridField(GridDims d, T fill) : dims(d), values(std::size_t(d.n_elems()), fill) {}

  T& at(int x, int y, int z) { return values[std::size_t(dims.elem_id(x, y, z))]; }
  const T& at(int x, int y, int z) const { return values[std::size_t(dims.elem_id(x, y, z))]; }
};

// Per-element material density in [0, 1].
using DensityField = GridField<double>;

// Per-element normalized strain energy in [0, 1].
using StrainEnergyField = GridField<double>;

// Three displacement DOFs per node, x-fastest node order.
struct DisplacementField {
  GridDims dims;
  std::vector<double> values;  // 3 * n_nodes, (ux, uy, uz) per node

  DisplacementField() = default;
  explicit DisplacementField(GridDims d) : dims(d), values(std::size_t(d.n_dofs()), 0.0) {}
};

struct NonConvergence : Error {
  NonConvergence(std::int64_t iterations, double residual)
      : Error("CG failed to converge after " + std::to_string(iterations) +
              " iterations (relative residual " + std::to_string(residual) + ")"),
        iterations(iterations),
        residual(residual) {}
  std::int64_t iterations;
  double residual;
};

struct SingularSystem : Error {
  using Error::Error;
};

}  // namespace voxgen::voxfem
