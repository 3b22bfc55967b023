#pragma once

#include <array>
#include <vector>

#include "voxgen/rng.hpp"
#include "voxgen/voxfem/types.hpp"

namespace voxgen::simpgen {

struct LoadRange {
  double lo = 0.5;
  double hi = 2.0;
};

struct ProblemSamplerConfig {
  voxfem::GridDims dims{16, 16, 16};
  // Magnitude ranges indexed by LoadKind.
  std::array<LoadRange, voxfem::kNumLoadKinds> magnitude_ranges = {{
      {0.5, 2.0},   // NodalForce
      {0.05, 0.5},  // SurfaceForce (per node)
      {0.1, 1.0},   // Pressure (per area)
      {0.5, 4.0},   // Moment
  }};
  std::vector<double> volfracs = {0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};
  voxfem::ElasticParams material;

  void validate() const {
    if (volfracs.empty()) throw InvalidArgument("sampler: volfrac set empty");
    for (double v : volfracs)
      if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("sampler: volfrac outside (0,1)");
    for (const auto& r : magnitude_ranges)
      if (!(r.lo < r.hi)) throw InvalidArgument("sampler: empty magnitude range");
  }
};

// Draws a random problem: three distinct non-collinear fixed nodes uniform on
// the grid boundary (triples redrawn while collinear, at most 1000 times) and
// one load of uniformly random kind.
voxfem::FemProblem sample_problem(Rng& rng, const ProblemSamplerConfig& cfg);

// Uniform draw from the configured volume-fraction set.
double sample_volfrac(Rng& rng, const ProblemSamplerConfig& cfg);

}  // namespace voxgen::simpgen
