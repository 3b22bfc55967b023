#include "voxgen/simpgen/sampler.hpp"

#include <algorithm>

namespace voxgen::simpgen {

using voxfem::FacePatch;
using voxfem::FemProblem;
using voxfem::GridDims;
using voxfem::LoadKind;
using voxfem::LoadSpec;

namespace {

bool is_boundary(const GridDims& dims, int x, int y, int z) {
  return x == 0 || x == dims.nx || y == 0 || y == dims.ny || z == 0 || z == dims.nz;
}

std::int64_t draw_boundary_node(Rng& rng, const GridDims& dims) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const std::int64_t node = std::int64_t(rng.uniform_index(std::uint64_t(dims.n_nodes())));
    int x, y, z;
    dims.node_coords(node, x, y, z);
    if (is_boundary(dims, x, y, z)) return node;
  }
  throw Error("sample_problem: boundary node rejection sampling failed");
}

FacePatch draw_patch(Rng& rng, const GridDims& dims) {
  FacePatch patch;
  patch.axis = int(rng.uniform_index(3));
  patch.side = int(rng.uniform_index(2));
  const int extent[3] = {dims.nx, dims.ny, dims.nz};
  int ua = patch.axis == 0 ? 1 : 0;
  int va = patch.axis == 2 ? 1 : 2;
  // At least 2x2 nodes so pressure cells and moment couples are well defined.
  const int nu = extent[ua] + 1, nv = extent[va] + 1;
  const int su = 2 + int(rng.uniform_index(std::uint64_t(nu - 1)));
  const int sv = 2 + int(rng.uniform_index(std::uint64_t(nv - 1)));
  patch.u0 = int(rng.uniform_index(std::uint64_t(nu - su + 1)));
  patch.u1 = patch.u0 + su - 1;
  patch.v0 = int(rng.uniform_index(std::uint64_t(nv - sv + 1)));
  patch.v1 = patch.v0 + sv - 1;
  return patch;
}

}  // namespace

FemProblem sample_problem(Rng& rng, const ProblemSamplerConfig& cfg) {
  cfg.validate();
  const GridDims& dims = cfg.dims;

  FemProblem problem;
  problem.dims = dims;
  problem.material = cfg.material;

  for (int attempt = 0;; ++attempt) {
    if (attempt >= 1000)
      throw Error("sample_problem: exceeded 1000 collinear fixture redraws");
    std::vector<std::int64_t> nodes;
    while (nodes.size() < 3) {
      std::int64_t n = draw_boundary_node(rng, dims);
      if (std::find(nodes.begin(), nodes.end(), n) == nodes.end()) nodes.push_back(n);
    }
    if (voxfem::nodes_non_collinear(dims, nodes)) {
      problem.fixed_nodes = std::move(nodes);
      break;
    }
  }

  LoadSpec load;
  load.kind = LoadKind(rng.uniform_index(voxfem::kNumLoadKinds));
  const LoadRange& range = cfg.magnitude_ranges[std::size_t(load.kind)];
  load.magnitude = rng.uniform(range.lo, range.hi);

  switch (load.kind) {
    case LoadKind::NodalForce: {
      std::int64_t node;
      do {
        node = draw_boundary_node(rng, dims);
      } while (std::find(problem.fixed_nodes.begin(), problem.fixed_nodes.end(), node) !=
               problem.fixed_nodes.end());
      load.node = node;
      double d[3];
      rng.unit_vector(d);
      load.direction = {d[0], d[1], d[2]};
      break;
    }
    case LoadKind::SurfaceForce:
    case LoadKind::Moment: {
      load.patch = draw_patch(rng, dims);
      double d[3];
      rng.unit_vector(d);
      load.direction = {d[0], d[1], d[2]};
      break;
    }
    case LoadKind::Pressure: {
      load.patch = draw_patch(rng, dims);
      // Direction is unused for pressure; store the outward normal.
      load.direction = {0.0, 0.0, 0.0};
      load.direction[std::size_t(load.patch.axis)] = load.patch.side ? 1.0 : -1.0;
      break;
    }
  }
  problem.loads.push_back(load);
  problem.validate();
  return problem;
}

double sample_volfrac(Rng& rng, const ProblemSamplerConfig& cfg) {
  return cfg.volfracs[rng.uniform_index(cfg.volfracs.size())];
}

}  // namespace voxgen::simpgen
