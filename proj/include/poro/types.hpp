#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace poro {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

/// Number of Voigt slots for symmetric 2-tensors in dimension d.
inline int voigt_size(int dim) { return dim * (dim + 1) / 2; }

/// Voigt index ordering: 2D (11,22,12); 3D (11,22,33,23,13,12).
/// Returns the slot for the unordered pair (i,j), 0-based tensor indices.
inline int voigt_index(int dim, int i, int j) {
  if (i == j) return i;
  int a = std::min(i, j), b = std::max(i, j);
  if (dim == 2) return 2; // (0,1)
  // 3D off-diagonals: (1,2)->3, (0,2)->4, (0,1)->5
  if (a == 1 && b == 2) return 3;
  if (a == 0 && b == 2) return 4;
  return 5;
}

/// Tensor index pair stored in Voigt slot v.
inline std::pair<int, int> voigt_pair(int dim, int v) {
  if (v < dim) return {v, v};
  if (dim == 2) return {0, 1};
  if (v == 3) return {1, 2};
  if (v == 4) return {0, 2};
  return {0, 1};
}

/// Elastic moduli in Voigt form with engineering shear convention:
/// strain vector (e11, e22[, e33], gamma23, gamma13, gamma12) with
/// gamma_ij = 2 e_ij, so energy density = eps^T A eps = a_ijkl e_ij e_kl.
struct ElasticTensor {
  int dim = 2;
  Mat voigt; // voigt_size x voigt_size, symmetric

  static ElasticTensor isotropic(int dim, double lambda, double mu) {
    ElasticTensor a;
    a.dim = dim;
    int n = voigt_size(dim);
    a.voigt = Mat::Zero(n, n);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a.voigt(i, j) = lambda + (i == j ? 2.0 * mu : 0.0);
    for (int s = dim; s < n; ++s) a.voigt(s, s) = mu;
    return a;
  }

  /// Component a_ijkl recovered from the Voigt matrix.
  double component(int i, int j, int k, int l) const {
    return voigt(voigt_index(dim, i, j), voigt_index(dim, k, l));
  }
};

struct MaterialParams {
  ElasticTensor a;
  double rho_s = 1.0;
  double rho_f = 1.0;
  double c0 = 1.0;
  double mu = 1.0;
  double eta = 0.0;
  double alpha = 1.0;

  double gamma() const { return c0 * c0 * rho_f; }
};

/// Validates the material invariants; throws BadMaterial naming the violated
/// constraint. Positive-definiteness of a is checked on symmetric strains
/// via the Voigt eigenvalues.
void validate_materials(const MaterialParams& m);

} // namespace poro
