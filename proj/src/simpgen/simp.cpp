#include "voxgen/simpgen/simp.hpp"

#include <algorithm>
#include <cmath>

namespace voxgen::simpgen {

using voxfem::DensityField;
using voxfem::GridDims;
using voxfem::StrainEnergyField;

std::vector<double> sensitivity_filter(const GridDims& dims, const DensityField& density,
                                       const std::vector<double>& sens, double radius) {
  if (radius < 1.0) throw InvalidArgument("sensitivity_filter: radius must be >= 1");
  if (density.dims != dims || sens.size() != std::size_t(dims.n_elems()))
    throw ShapeMismatch("sensitivity_filter: field sizes do not match dims");

  // Offsets with positive conic weight.
  struct Offset {
    int dx, dy, dz;
    double w;
  };
  std::vector<Offset> offsets;
  const int reach = int(std::ceil(radius)) - 1;
  for (int dz = -reach; dz <= reach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        double dist = std::sqrt(double(dx * dx + dy * dy + dz * dz));
        if (radius - dist > 0.0) offsets.push_back({dx, dy, dz, radius - dist});
      }

  std::vector<double> out(sens.size());
  for (int z = 0; z < dims.nz; ++z) {
    for (int y = 0; y < dims.ny; ++y) {
      for (int x = 0; x < dims.nx; ++x) {
        double num = 0.0, den = 0.0;
        for (const auto& o : offsets) {
          const int ix = x + o.dx, iy = y + o.dy, iz = z + o.dz;
          if (ix < 0 || ix >= dims.nx || iy < 0 || iy >= dims.ny || iz < 0 || iz >= dims.nz)
            continue;
          const std::size_t i = std::size_t(dims.elem_id(ix, iy, iz));
          num += o.w * density.values[i] * sens[i];
          den += o.w;
        }
        const std::size_t e = std::size_t(dims.elem_id(x, y, z));
        out[e] = num / (density.values[e] * den);
      }
    }
  }
  return out;
}

voxfem::DensityField oc_update(const DensityField& density, const std::vector<double>& sens,
                               const SimpConfig& cfg) {
  cfg.validate();
  const std::size_t n = density.values.size();
  if (sens.size() != n) throw ShapeMismatch("oc_update: sensitivity size mismatch");
  for (double s : sens) {
    if (s > 1e-12) throw InvalidArgument("oc_update: compliance sensitivities must be <= 0");
  }

  const double eta = cfg.damping;
  const double move = cfg.move_limit;

  auto mean_for = [&](double lambda, DensityField* out) {
    double total = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      const double rho = density.values[e];
      const double lo = std::max(cfg.rho_min, rho - move);
      const double hi = std::min(1.0, rho + move);
      const double b = -sens[e] / lambda;
      double v = rho * std::pow(b, eta);
      v = std::clamp(v, lo, hi);
      total += v;
      if (out) out->values[e] = v;
    }
    return total / double(n);
  };

  // mean_for is non-increasing in lambda; establish a bracket around volfrac.
  double l1 = 1e-12, l2 = 1e12;
  if (mean_for(l1, nullptr) < cfg.volfrac - 1e-6 || mean_for(l2, nullptr) > cfg.volfrac + 1e-6)
    throw BisectionFailure("oc_update: volume target unreachable within move limits");

  // Bisect until the multiplier is pinned to machine precision; this keeps the
  // update a reproducible function of (density, sens) rather than of the stop
  // tolerance.
  while ((l2 - l1) > 1e-14 * (l1 + l2)) {
    const double lmid = 0.5 * (l1 + l2);
    if (mean_for(lmid, nullptr) > cfg.volfrac)
      l1 = lmid;
    else
      l2 = lmid;
  }

  DensityField out(density.dims, 0.0);
  const double lambda = 0.5 * (l1 + l2);
  const double mean = mean_for(lambda, &out);
  if (std::abs(mean - cfg.volfrac) > 1e-6)
    throw BisectionFailure("oc_update: bisection stalled at mean " + std::to_string(mean));
  return out;
}

SimpResult run_simp(const voxfem::FemProblem& problem, const SimpConfig& cfg) {
  problem.validate();
  cfg.validate();
  const GridDims& dims = problem.dims;
  const std::size_t n = std::size_t(dims.n_elems());
  const auto& mat = problem.material;

  SimpResult result;
  result.density = DensityField(dims, cfg.volfrac);
  const std::vector<double> f = voxfem::assemble_loads(problem);

  voxfem::DisplacementField u(dims);
  bool have_u = false;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    voxfem::VoxelOperator op(problem, result.density, cfg.solver);
    u = op.solve(f, have_u ? &u : nullptr);
    have_u = true;

    const std::vector<double> terms = voxfem::element_strain_terms(problem, u);

    if (iter == 1) {
      // Condition field: strain energy of the yet-unoptimized uniform domain.
      result.strain_energy = voxfem::strain_energy_field(problem, result.density, u);
    }

    double c = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) c += f[i] * u.values[i];

    std::vector<double> sens(n);
    for (std::size_t e = 0; e < n; ++e) {
      const double rho = result.density.values[e];
      sens[e] = -mat.dyoungs_drho(rho) * terms[e];
    }
    const std::vector<double> filtered =
        sensitivity_filter(dims, result.density, sens, cfg.filter_radius);

    DensityField updated = oc_update(result.density, filtered, cfg);

    double change = 0.0, vol = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      change = std::max(change, std::abs(updated.values[e] - result.density.values[e]));
      vol += updated.values[e];
    }
    vol /= double(n);
    result.density = std::move(updated);

    result.history.compliance.push_back(c);
    result.history.volume_fraction.push_back(vol);
    result.history.max_change.push_back(change);

    if (change < cfg.convergence_tol) break;
  }
  return result;
}

}  // namespace voxgen::simpgen
