#include "voxgen/voxfem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace voxgen::voxfem {

namespace {

void node_position(const GridDims& dims, std::int64_t node, double p[3]) {
  int x, y, z;
  dims.node_coords(node, x, y, z);
  p[0] = x;
  p[1] = y;
  p[2] = z;
}

// Tangent axes of a face, ascending axis order.
void face_tangents(int axis, int& ua, int& va) {
  switch (axis) {
    case 0: ua = 1; va = 2; break;
    case 1: ua = 0; va = 2; break;
    default: ua = 0; va = 1; break;
  }
}

std::int64_t patch_node(const GridDims& dims, const FacePatch& patch, int u, int v) {
  int c[3];
  int ua, va;
  face_tangents(patch.axis, ua, va);
  const int extent[3] = {dims.nx, dims.ny, dims.nz};
  c[patch.axis] = patch.side ? extent[patch.axis] : 0;
  c[ua] = u;
  c[va] = v;
  return dims.node_id(c[0], c[1], c[2]);
}

void validate_patch(const GridDims& dims, const FacePatch& patch, bool needs_cell) {
  if (patch.axis < 0 || patch.axis > 2 || patch.side < 0 || patch.side > 1)
    throw InvalidArgument("FacePatch: bad face selector");
  int ua, va;
  face_tangents(patch.axis, ua, va);
  const int extent[3] = {dims.nx, dims.ny, dims.nz};
  if (patch.u0 < 0 || patch.u1 > extent[ua] || patch.u0 > patch.u1 ||
      patch.v0 < 0 || patch.v1 > extent[va] || patch.v0 > patch.v1)
    throw InvalidArgument("FacePatch: patch outside grid");
  if (needs_cell && (patch.u1 == patch.u0 || patch.v1 == patch.v0))
    throw InvalidArgument("FacePatch: pressure patch needs at least one face cell");
}

void outward_normal(const FacePatch& patch, double n[3]) {
  n[0] = n[1] = n[2] = 0.0;
  n[patch.axis] = patch.side ? 1.0 : -1.0;
}

}  // namespace

bool nodes_non_collinear(const GridDims& dims, const std::vector<std::int64_t>& nodes) {
  if (nodes.size() < 3) return false;
  double p0[3];
  node_position(dims, nodes[0], p0);
  // Find one nonzero difference vector, then any second one independent of it.
  double a[3] = {0, 0, 0};
  bool have_a = false;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    double p[3];
    node_position(dims, nodes[i], p);
    double d[3] = {p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]};
    if (!have_a) {
      if (d[0] != 0.0 || d[1] != 0.0 || d[2] != 0.0) {
        a[0] = d[0], a[1] = d[1], a[2] = d[2];
        have_a = true;
      }
      continue;
    }
    double cx = a[1] * d[2] - a[2] * d[1];
    double cy = a[2] * d[0] - a[0] * d[2];
    double cz = a[0] * d[1] - a[1] * d[0];
    if (cx != 0.0 || cy != 0.0 || cz != 0.0) return true;
  }
  return false;
}

void FemProblem::validate() const {
  material.validate();
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
    throw InvalidArgument("FemProblem: empty grid");
  if (fixed_nodes.size() < 3)
    throw InvalidArgument("FemProblem: need at least 3 fixed nodes");
  for (auto n : fixed_nodes) {
    if (!dims.node_in_grid(n)) throw InvalidArgument("FemProblem: fixed node outside grid");
  }
  if (!nodes_non_collinear(dims, fixed_nodes))
    throw InvalidArgument("FemProblem: fixed nodes are collinear");
  if (loads.empty()) throw InvalidArgument("FemProblem: no loads");
  for (const auto& load : loads) {
    switch (load.kind) {
      case LoadKind::NodalForce:
        if (!dims.node_in_grid(load.node))
          throw InvalidArgument("FemProblem: load node outside grid");
        break;
      case LoadKind::SurfaceForce:
      case LoadKind::Moment:
        validate_patch(dims, load.patch, false);
        break;
      case LoadKind::Pressure:
        validate_patch(dims, load.patch, true);
        break;
    }
    if (load.kind != LoadKind::Pressure) {
      double n2 = load.direction[0] * load.direction[0] +
                  load.direction[1] * load.direction[1] +
                  load.direction[2] * load.direction[2];
      if (std::abs(n2 - 1.0) > 1e-6)
        throw InvalidArgument("FemProblem: load direction must be a unit vector");
    }
  }
}

std::vector<double> assemble_loads(const FemProblem& problem) {
  const GridDims& dims = problem.dims;
  std::vector<double> f(std::size_t(dims.n_dofs()), 0.0);

  auto add_nodal = [&](std::int64_t node, const double v[3]) {
    f[std::size_t(3 * node + 0)] += v[0];
    f[std::size_t(3 * node + 1)] += v[1];
    f[std::size_t(3 * node + 2)] += v[2];
  };

  for (const auto& load : problem.loads) {
    switch (load.kind) {
      case LoadKind::NodalForce: {
        double v[3] = {load.magnitude * load.direction[0],
                       load.magnitude * load.direction[1],
                       load.magnitude * load.direction[2]};
        add_nodal(load.node, v);
        break;
      }
      case LoadKind::SurfaceForce: {
        double v[3] = {load.magnitude * load.direction[0],
                       load.magnitude * load.direction[1],
                       load.magnitude * load.direction[2]};
        for (int u = load.patch.u0; u <= load.patch.u1; ++u)
          for (int v2 = load.patch.v0; v2 <= load.patch.v1; ++v2)
            add_nodal(patch_node(dims, load.patch, u, v2), v);
        break;
      }
      case LoadKind::Pressure: {
        // Uniform pressure on the patch, acting against the outward normal.
        // Each unit face cell spreads magnitude * area over its 4 corners.
        double n[3];
        outward_normal(load.patch, n);
        const double share = -0.25 * load.magnitude;
        double v[3] = {share * n[0], share * n[1], share * n[2]};
        for (int u = load.patch.u0; u < load.patch.u1; ++u) {
          for (int v2 = load.patch.v0; v2 < load.patch.v1; ++v2) {
            add_nodal(patch_node(dims, load.patch, u, v2), v);
            add_nodal(patch_node(dims, load.patch, u + 1, v2), v);
            add_nodal(patch_node(dims, load.patch, u, v2 + 1), v);
            add_nodal(patch_node(dims, load.patch, u + 1, v2 + 1), v);
          }
        }
        break;
      }
      case LoadKind::Moment: {
        // Force couple about the axis `direction` through the patch centroid:
        // f_i = c (m x r_i), with c set so the total moment is `magnitude`.
        // Net force vanishes because sum r_i = 0.
        std::vector<std::int64_t> nodes;
        for (int u = load.patch.u0; u <= load.patch.u1; ++u)
          for (int v2 = load.patch.v0; v2 <= load.patch.v1; ++v2)
            nodes.push_back(patch_node(dims, load.patch, u, v2));
        double centroid[3] = {0, 0, 0};
        for (auto n : nodes) {
          double p[3];
          node_position(dims, n, p);
          centroid[0] += p[0];
          centroid[1] += p[1];
          centroid[2] += p[2];
        }
        for (double& c : centroid) c /= double(nodes.size());
        const auto& m = load.direction;
        double denom = 0.0;
        for (auto n : nodes) {
          double p[3];
          node_position(dims, n, p);
          double r[3] = {p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]};
          double rm = r[0] * m[0] + r[1] * m[1] + r[2] * m[2];
          denom += r[0] * r[0] + r[1] * r[1] + r[2] * r[2] - rm * rm;
        }
        if (denom <= 1e-12)
          throw InvalidArgument("Moment load: patch degenerate about the moment axis");
        const double c = load.magnitude / denom;
        for (auto n : nodes) {
          double p[3];
          node_position(dims, n, p);
          double r[3] = {p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]};
          double v[3] = {c * (m[1] * r[2] - m[2] * r[1]),
                         c * (m[2] * r[0] - m[0] * r[2]),
                         c * (m[0] * r[1] - m[1] * r[0])};
          add_nodal(n, v);
        }
        break;
      }
    }
  }

  for (auto n : problem.fixed_nodes) {
    f[std::size_t(3 * n + 0)] = 0.0;
    f[std::size_t(3 * n + 1)] = 0.0;
    f[std::size_t(3 * n + 2)] = 0.0;
  }
  return f;
}

VoxelOperator::VoxelOperator(const FemProblem& problem, const DensityField& density,
                             SolverOptions options)
    : problem_(problem), options_(options), ke_(element_stiffness(problem.material)) {
  if (problem.fixed_nodes.size() < 3 || !nodes_non_collinear(problem.dims, problem.fixed_nodes))
    throw SingularSystem("fixed nodes leave rigid modes unconstrained");
  if (density.dims != problem.dims)
    throw ShapeMismatch("density dims do not match problem dims");

  const GridDims& dims = problem.dims;
  const std::int64_t ne = dims.n_elems();
  youngs_.resize(std::size_t(ne));
  for (std::int64_t e = 0; e < ne; ++e) {
    double rho = density.values[std::size_t(e)];
    if (rho < 0.0 || rho > 1.0) throw InvalidArgument("density outside [0,1]");
    youngs_[std::size_t(e)] = problem.material.youngs(rho);
  }

  fixed_.assign(std::size_t(dims.n_nodes()), 0);
  for (auto n : problem.fixed_nodes) fixed_[std::size_t(n)] = 1;

  // Jacobi diagonal: assembled element diagonals, unit entries at fixed DOFs.
  diag_.assign(std::size_t(dims.n_dofs()), 0.0);
  const std::int64_t sy = dims.nx + 1;
  const std::int64_t sz = std::int64_t(dims.nx + 1) * (dims.ny + 1);
  for (int ez = 0; ez < dims.nz; ++ez) {
    for (int ey = 0; ey < dims.ny; ++ey) {
      for (int ex = 0; ex < dims.nx; ++ex) {
        const double E = youngs_[std::size_t(dims.elem_id(ex, ey, ez))];
        const std::int64_t n0 = dims.node_id(ex, ey, ez);
        const std::int64_t nd[8] = {n0,      n0 + 1,      n0 + sy,      n0 + sy + 1,
                                    n0 + sz, n0 + sz + 1, n0 + sz + sy, n0 + sz + sy + 1};
        for (int l = 0; l < 8; ++l) {
          for (int c = 0; c < 3; ++c) {
            const int d = 3 * l + c;
            diag_[std::size_t(3 * nd[l] + c)] += E * ke_[std::size_t(25 * d)];
          }
        }
      }
    }
  }
  for (std::int64_t n = 0; n < dims.n_nodes(); ++n) {
    if (fixed_[std::size_t(n)]) {
      diag_[std::size_t(3 * n + 0)] = 1.0;
      diag_[std::size_t(3 * n + 1)] = 1.0;
      diag_[std::size_t(3 * n + 2)] = 1.0;
    }
  }
}

void VoxelOperator::apply(const std::vector<double>& u, std::vector<double>& out) const {
  const GridDims& dims = problem_.dims;
  const std::size_t ndof = std::size_t(dims.n_dofs());
  if (u.size() != ndof) throw ShapeMismatch("apply: dof vector size mismatch");
  out.assign(ndof, 0.0);

  // Eliminated operator: zero rows/columns at fixed DOFs, unit diagonal.
  // Column elimination needs u to vanish there; copy only when it does not.
  const std::vector<double>* up = &u;
  std::vector<double> masked;
  for (auto n : problem_.fixed_nodes) {
    if (u[std::size_t(3 * n)] != 0.0 || u[std::size_t(3 * n + 1)] != 0.0 ||
        u[std::size_t(3 * n + 2)] != 0.0) {
      masked = u;
      for (auto m : problem_.fixed_nodes)
        masked[std::size_t(3 * m)] = masked[std::size_t(3 * m + 1)] =
            masked[std::size_t(3 * m + 2)] = 0.0;
      up = &masked;
      break;
    }
  }
  const double* uv = up->data();
  double* ov = out.data();
  const double* KE = ke_.data();

  const std::int64_t sy = dims.nx + 1;
  const std::int64_t sz = std::int64_t(dims.nx + 1) * (dims.ny + 1);
  std::int64_t e = 0;
  for (int ez = 0; ez < dims.nz; ++ez) {
    for (int ey = 0; ey < dims.ny; ++ey) {
      const std::int64_t nrow = dims.node_id(0, ey, ez);
      for (int ex = 0; ex < dims.nx; ++ex, ++e) {
        const double E = youngs_[std::size_t(e)];
        const std::int64_t n0 = nrow + ex;
        const std::int64_t nd[8] = {n0,      n0 + 1,      n0 + sy,      n0 + sy + 1,
                                    n0 + sz, n0 + sz + 1, n0 + sz + sy, n0 + sz + sy + 1};
        double ue[24];
        for (int l = 0; l < 8; ++l) {
          const double* src = uv + 3 * nd[l];
          ue[3 * l + 0] = src[0];
          ue[3 * l + 1] = src[1];
          ue[3 * l + 2] = src[2];
        }
        double keu[24];
        for (int r = 0; r < 24; ++r) {
          const double* row = KE + 24 * r;
          double acc = 0.0;
          for (int c = 0; c < 24; ++c) acc += row[c] * ue[c];
          keu[r] = acc;
        }
        for (int l = 0; l < 8; ++l) {
          double* dst = ov + 3 * nd[l];
          dst[0] += E * keu[3 * l + 0];
          dst[1] += E * keu[3 * l + 1];
          dst[2] += E * keu[3 * l + 2];
        }
      }
    }
  }

  for (auto n : problem_.fixed_nodes) {
    ov[3 * n + 0] = u[std::size_t(3 * n + 0)];
    ov[3 * n + 1] = u[std::size_t(3 * n + 1)];
    ov[3 * n + 2] = u[std::size_t(3 * n + 2)];
  }
}

DisplacementField VoxelOperator::solve(const std::vector<double>& f,
                                       const DisplacementField* warm_start) const {
  const GridDims& dims = problem_.dims;
  const std::size_t ndof = std::size_t(dims.n_dofs());
  if (f.size() != ndof) throw ShapeMismatch("solve: load vector size mismatch");

  DisplacementField result(dims);
  std::vector<double>& x = result.values;

  double fnorm2 = 0.0;
  for (std::size_t i = 0; i < ndof; ++i) fnorm2 += f[i] * f[i];
  const double fnorm = std::sqrt(fnorm2);
  last_iterations_ = 0;
  if (fnorm == 0.0) return result;  // homogeneous system

  if (warm_start && warm_start->values.size() == ndof) {
    x = warm_start->values;
    for (auto n : problem_.fixed_nodes)
      x[std::size_t(3 * n)] = x[std::size_t(3 * n + 1)] = x[std::size_t(3 * n + 2)] = 0.0;
  }

  std::vector<double> r(ndof), z(ndof), p(ndof), q(ndof);
  apply(x, q);
  for (std::size_t i = 0; i < ndof; ++i) r[i] = f[i] - q[i];

  auto precond = [&](const std::vector<double>& in, std::vector<double>& outv) {
    for (std::size_t i = 0; i < ndof; ++i) outv[i] = in[i] / diag_[i];
  };

  precond(r, z);
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < ndof; ++i) rz += r[i] * z[i];

  const std::int64_t max_iters =
      options_.max_iters > 0 ? options_.max_iters : 10 * std::int64_t(ndof);
  double rel = 0.0;
  {
    double rn2 = 0.0;
    for (std::size_t i = 0; i < ndof; ++i) rn2 += r[i] * r[i];
    rel = std::sqrt(rn2) / fnorm;
    if (rel <= options_.rel_tol) return result;
  }

  for (std::int64_t it = 1; it <= max_iters; ++it) {
    apply(p, q);
    double pq = 0.0;
    for (std::size_t i = 0; i < ndof; ++i) pq += p[i] * q[i];
    if (pq <= 0.0) throw SingularSystem("CG breakdown: operator not positive definite");
    const double alpha = rz / pq;
    double rn2 = 0.0;
    for (std::size_t i = 0; i < ndof; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      rn2 += r[i] * r[i];
    }
    last_iterations_ = it;
    rel = std::sqrt(rn2) / fnorm;
    if (rel <= options_.rel_tol) return result;
    precond(r, z);
    double rz_new = 0.0;
    for (std::size_t i = 0; i < ndof; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < ndof; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NonConvergence(max_iters, rel);
}

DisplacementField solve(const FemProblem& problem, const DensityField& density,
                        SolverOptions options) {
  VoxelOperator op(problem, density, options);
  return op.solve(assemble_loads(problem));
}

std::vector<double> element_strain_terms(const FemProblem& problem, const DisplacementField& u) {
  const GridDims& dims = problem.dims;
  const ElementMatrix ke = element_stiffness(problem.material);
  std::vector<double> terms(std::size_t(dims.n_elems()), 0.0);

  const std::int64_t sy = dims.nx + 1;
  const std::int64_t sz = std::int64_t(dims.nx + 1) * (dims.ny + 1);
  const double* uv = u.values.data();
  std::int64_t e = 0;
  for (int ez = 0; ez < dims.nz; ++ez) {
    for (int ey = 0; ey < dims.ny; ++ey) {
      for (int ex = 0; ex < dims.nx; ++ex, ++e) {
        const std::int64_t n0 = dims.node_id(ex, ey, ez);
        const std::int64_t nd[8] = {n0,      n0 + 1,      n0 + sy,      n0 + sy + 1,
                                    n0 + sz, n0 + sz + 1, n0 + sz + sy, n0 + sz + sy + 1};
        double ue[24];
        for (int l = 0; l < 8; ++l) {
          const double* src = uv + 3 * nd[l];
          ue[3 * l + 0] = src[0];
          ue[3 * l + 1] = src[1];
          ue[3 * l + 2] = src[2];
        }
        terms[std::size_t(e)] = element_energy(ke, ue);
      }
    }
  }
  return terms;
}

double compliance(const FemProblem& problem, const DensityField& density,
                  const DisplacementField& u) {
  (void)density;
  std::vector<double> f = assemble_loads(problem);
  double c = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) c += f[i] * u.values[i];
  return c;
}

double compliance_element_sum(const FemProblem& problem, const DensityField& density,
                              const DisplacementField& u) {
  std::vector<double> terms = element_strain_terms(problem, u);
  double c = 0.0;
  for (std::size_t e = 0; e < terms.size(); ++e)
    c += problem.material.youngs(density.values[e]) * terms[e];
  return c;
}

std::vector<double> raw_strain_energy(const FemProblem& problem, const DensityField& density,
                                      const DisplacementField& u) {
  std::vector<double> terms = element_strain_terms(problem, u);
  for (std::size_t e = 0; e < terms.size(); ++e)
    terms[e] *= 0.5 * problem.material.youngs(density.values[e]);
  return terms;
}

StrainEnergyField strain_energy_field(const FemProblem& problem, const DensityField& density,
                                      const DisplacementField& u) {
  std::vector<double> raw = raw_strain_energy(problem, density, u);
  StrainEnergyField field(problem.dims, 0.0);

  double vmax = 0.0;
  for (double v : raw) vmax = std::max(vmax, v);
  if (vmax <= 0.0) return field;  // identically zero stays zero

  // Clip at the 99.5th percentile (linear interpolation between order stats),
  // then min-max normalize the clipped values to [0, 1].
  std::vector<double> sorted = raw;
  std::sort(sorted.begin(), sorted.end());
  const double pos = 0.995 * double(sorted.size() - 1);
  const std::size_t lo = std::size_t(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  const double clip = sorted[lo] + frac * (sorted[hi] - sorted[lo]);

  const double vmin = sorted.front();
  if (clip <= vmin) {
    // Degenerate spread (e.g. constant field): everything maps to the top.
    for (auto& v : field.values) v = 1.0;
    return field;
  }
  const double inv = 1.0 / (clip - vmin);
  for (std::size_t e = 0; e < raw.size(); ++e) {
    double v = std::min(raw[e], clip);
    field.values[e] = (v - vmin) * inv;
  }
  return field;
}

}  // namespace voxgen::voxfem
