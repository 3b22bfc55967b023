#include "voxgen/voxfem/hex8.hpp"

#include <Eigen/Dense>

namespace voxgen::voxfem {

namespace {

// Corner sign of local node l along each natural axis, local order
// l = dx + 2*dy + 4*dz.
inline void corner_signs(int l, double s[3]) {
  s[0] = (l & 1) ? 1.0 : -1.0;
  s[1] = (l & 2) ? 1.0 : -1.0;
  s[2] = (l & 4) ? 1.0 : -1.0;
}

}  // namespace

ElementMatrix element_stiffness(const ElasticParams& material) {
  material.validate();
  const double nu = material.poisson;
  const double lambda = nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = 1.0 / (2.0 * (1.0 + nu));

  Eigen::Matrix<double, 6, 6> D = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) D(i, j) = lambda;
    D(i, i) = lambda + 2.0 * mu;
    D(3 + i, 3 + i) = mu;
  }

  // Unit cube mapped from [-1,1]^3: J = I/2, detJ = 1/8, dN/dx = 2 dN/dxi.
  const double gp = 1.0 / std::sqrt(3.0);
  const double detj = 0.125;

  Eigen::Matrix<double, 24, 24> K = Eigen::Matrix<double, 24, 24>::Zero();
  for (int gz = 0; gz < 2; ++gz) {
    for (int gy = 0; gy < 2; ++gy) {
      for (int gx = 0; gx < 2; ++gx) {
        const double xi[3] = {gx ? gp : -gp, gy ? gp : -gp, gz ? gp : -gp};
        Eigen::Matrix<double, 6, 24> B = Eigen::Matrix<double, 6, 24>::Zero();
        for (int l = 0; l < 8; ++l) {
          double s[3];
          corner_signs(l, s);
          // dN/dx_a = 2 * (s_a/8) * prod_{b != a} (1 + xi_b s_b)
          double g[3];
          for (int a = 0; a < 3; ++a) {
            double p = 0.25 * s[a];
            for (int b = 0; b < 3; ++b) {
              if (b != a) p *= 1.0 + xi[b] * s[b];
            }
            g[a] = p;
          }
          const int c = 3 * l;
          B(0, c + 0) = g[0];
          B(1, c + 1) = g[1];
          B(2, c + 2) = g[2];
          B(3, c + 0) = g[1];  // gamma_xy
          B(3, c + 1) = g[0];
          B(4, c + 1) = g[2];  // gamma_yz
          B(4, c + 2) = g[1];
          B(5, c + 0) = g[2];  // gamma_xz
          B(5, c + 2) = g[0];
        }
        K.noalias() += detj * B.transpose() * D * B;
      }
    }
  }

  // Symmetrize to scrub accumulation roundoff.
  Eigen::Matrix<double, 24, 24> Ks = 0.5 * (K + K.transpose());
  ElementMatrix out;
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) out[std::size_t(24 * r + c)] = Ks(r, c);
  return out;
}

}  // namespace voxgen::voxfem
