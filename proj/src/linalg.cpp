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

#include "iqseq/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace iqseq {

namespace {

// Rotate a column so its largest-magnitude component is real positive.
// Returns the applied phase so paired vectors can be rotated consistently.
Complex fix_column_phase(Eigen::Ref<ComplexVector> col) {
  Index best = 0;
  double best_mag = 0.0;
  for (Index i = 0; i < col.size(); ++i) {
    const double mag = std::abs(col(i));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag < 1e-300) return Complex(1.0, 0.0);
  const Complex phase = col(best) / best_mag;
  col *= std::conj(phase);
  return std::conj(phase);
}

void require_square(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("matrix is not square");
}

}  // namespace

Index Spectrum::rank() const {
  Index r = 0;
  for (Index i = 0; i < eigenvalues.size(); ++i)
    if (std::abs(eigenvalues(i)) > zero_cutoff) ++r;
  return r;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

double spectral_norm_hermitian(const ComplexMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(h),
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ComplexMatrix hermitize(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

Spectrum spectral_decomposition(const ComplexMatrix& h, double tol) {
  require_square(h);
  if (!is_hermitian(h, tol))
    throw std::invalid_argument("matrix is not Hermitian within tolerance");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(h));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed to converge");

  const Index n = h.rows();
  Spectrum out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Index i = 0; i < n; ++i) fix_column_phase(out.eigenvectors.col(i));
  const double lambda_max =
      n > 0 ? out.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  out.zero_cutoff = tol * lambda_max;
  return out;
}

namespace {

// Applies f to the retained (above-cutoff) part of the spectrum of a PSD
// matrix; eigenvalues at or below the cutoff are mapped to zero.
ComplexMatrix psd_spectral_function(const ComplexMatrix& h, double tol,
                                    double (*f)(double, double), double gamma) {
  Spectrum spec = spectral_decomposition(h, tol);
  const Index n = h.rows();
  if (n == 0) return h;
  const double scale = spec.eigenvalues.cwiseAbs().maxCoeff();
  if (spec.eigenvalues(n - 1) < -tol * scale)
    throw std::domain_error("negative eigenvalue beyond tolerance");

  const double lambda_max = std::max(spec.eigenvalues(0), 0.0);
  const double cutoff = tol * lambda_max;
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double lambda = spec.eigenvalues(i);
    if (lambda <= cutoff) break;  // descending order
    out.noalias() += f(lambda, gamma) *
                     (spec.eigenvectors.col(i) *
                      spec.eigenvectors.col(i).adjoint());
  }
  return hermitize(out);
}

double power_fn(double lambda, double gamma) { return std::pow(lambda, gamma); }
double one_fn(double, double) { return 1.0; }

}  // namespace

ComplexMatrix matrix_power(const ComplexMatrix& h, double gamma, double tol) {
  return psd_spectral_function(h, tol, power_fn, gamma);
}

ComplexMatrix support_projector(const ComplexMatrix& h, double tol) {
  return psd_spectral_function(h, tol, one_fn, 0.0);
}

ComplexMatrix pauli_power(const ComplexMatrix& h, double gamma, double tol) {
  if (h.rows() != 2 || h.cols() != 2)
    throw std::invalid_argument("pauli_power requires a 2x2 matrix");
  if (!is_hermitian(h, tol))
    throw std::invalid_argument("matrix is not Hermitian within tolerance");

  const double alpha = 0.5 * std::real(h(0, 0) + h(1, 1));
  Eigen::Vector3d v;
  v(0) = 0.5 * std::real(h(0, 1) + h(1, 0));
  v(1) = 0.5 * std::imag(h(1, 0) - h(0, 1));
  v(2) = 0.5 * std::real(h(0, 0) - h(1, 1));
  const double beta = v.norm();

  const double lambda_plus = alpha + beta;
  const double lambda_minus = alpha - beta;
  const double scale = std::max(std::abs(lambda_plus), std::abs(lambda_minus));
  if (lambda_minus < -tol * scale)
    throw std::domain_error("negative eigenvalue beyond tolerance");

  const double cutoff = tol * std::max(lambda_plus, 0.0);
  const auto pow_or_zero = [&](double lambda) {
    return lambda > cutoff ? std::pow(lambda, gamma) : 0.0;
  };
  const double fp = pow_or_zero(lambda_plus);
  const double fm = pow_or_zero(lambda_minus);

  ComplexMatrix out = 0.5 * (fp + fm) * ComplexMatrix::Identity(2, 2);
  if (beta > 0.0) out += (0.5 * (fp - fm) / beta) * pauli_vector(v);
  return out;
}

Svd svd(const ComplexMatrix& t, double tol) {
  Eigen::JacobiSVD<ComplexMatrix> solver(
      t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& all = solver.singularValues();
  const double cutoff = all.size() > 0 ? tol * all(0) : 0.0;
  Index kept = 0;
  while (kept < all.size() && all(kept) > cutoff) ++kept;

  Svd out;
  out.singular_values = all.head(kept);
  out.left = solver.matrixU().leftCols(kept);
  out.right = solver.matrixV().leftCols(kept);
  for (Index v = 0; v < kept; ++v) {
    const Complex phase = fix_column_phase(out.right.col(v));
    out.left.col(v) *= phase;
  }
  return out;
}

ComplexMatrix complete_basis(const ComplexMatrix& columns, Index dim) {
  if (columns.rows() != dim && columns.size() != 0)
    throw std::invalid_argument("basis columns have wrong dimension");
  ComplexMatrix basis(dim, dim);
  Index filled = std::min<Index>(columns.cols(), dim);
  basis.leftCols(filled) = columns.leftCols(filled);

  for (Index i = 0; i < dim && filled < dim; ++i) {
    ComplexVector w = ComplexVector::Zero(dim);
    w(i) = 1.0;
    // Two Gram-Schmidt passes for numerical orthogonality.
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * w);
    const double norm = w.norm();
    if (norm > 1e-6) {
      basis.col(filled) = w / norm;
      ++filled;
    }
  }
  if (filled < dim)
    throw std::runtime_error("failed to complete orthonormal basis");
  return basis;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix pauli_vector(const Eigen::Vector3d& n) {
  return n(0) * pauli_x() + n(1) * pauli_y() + n(2) * pauli_z();
}

}  // namespace iqseq
