// Copyright 2025 The iqseq developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "iqseq/types.hpp"

namespace iqseq {

/// Hermitian eigendecomposition. Eigenvalues are sorted descending and each
/// eigenvector's largest-magnitude component is made real positive so that
/// repeated runs produce identical output.
struct Spectrum {
  RealVector eigenvalues;      // descending
  ComplexMatrix eigenvectors;  // orthonormal columns, one per eigenvalue
  double zero_cutoff = 0.0;    // tol * max|eigenvalue|

  /// Number of eigenvalues with magnitude above the cutoff.
  Index rank() const;
};

/// Thin singular value decomposition, T = left * diag(s) * right^dagger.
/// Singular values at or below tol * s_max are dropped.
struct Svd {
  ComplexMatrix left;          // columns |f_v>
  RealVector singular_values;  // descending, all above cutoff
  ComplexMatrix right;         // columns |e_v>

  Index rank() const { return singular_values.size(); }
};

bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol);

/// Largest |eigenvalue| of a Hermitian matrix.
double spectral_norm_hermitian(const ComplexMatrix& h);

/// (m + m^dagger) / 2
ComplexMatrix hermitize(const ComplexMatrix& m);

/// Throws std::invalid_argument if the input is not square Hermitian within tol.
Spectrum spectral_decomposition(const ComplexMatrix& h, double tol = kDefaultTol);

/// H^gamma for Hermitian PSD H, in the Moore-Penrose sense: the power is
/// applied only to eigenvalues above tol * lambda_max; the rest are mapped to
/// zero regardless of the sign of gamma. In particular gamma = 0 yields the
/// support projector and gamma = -1/2 the pseudo-inverse square root.
/// Throws std::domain_error on a negative eigenvalue beyond tolerance.
ComplexMatrix matrix_power(const ComplexMatrix& h, double gamma,
                           double tol = kDefaultTol);

/// Closed-form 2x2 power through the Pauli decomposition H = a*I + v.sigma,
/// with the same retained-support convention as matrix_power.
/// Throws std::invalid_argument unless H is 2x2 Hermitian.
ComplexMatrix pauli_power(const ComplexMatrix& h, double gamma,
                          double tol = kDefaultTol);

/// Orthogonal projector onto the support of a PSD matrix.
ComplexMatrix support_projector(const ComplexMatrix& h,
                                double tol = kDefaultTol);

Svd svd(const ComplexMatrix& t, double tol = kDefaultTol);

/// Extends a set of orthonormal columns to a full orthonormal basis of C^dim
/// by Gram-Schmidt over the standard basis vectors in index order.
ComplexMatrix complete_basis(const ComplexMatrix& columns, Index dim);

/// Kronecker product with row-major index pairing: (A kron B)[(i,j),(a,b)] =
/// A[i,a] * B[j,b] where (i,j) -> i * B.rows() + j.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// n.sigma for a real 3-vector n.
ComplexMatrix pauli_vector(const Eigen::Vector3d& n);

}  // namespace iqseq
