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

#include <catch2/catch_amalgamated.hpp>

#include "iqseq/examples.hpp"
#include "support/random_instances.hpp"

using namespace iqseq;
using iqseq::testing::Rng;

namespace {

ComplexMatrix diag3(double a, double b, double c) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

}  // namespace

TEST_CASE("spectral decomposition of the identity") {
  const Spectrum spec = spectral_decomposition(ComplexMatrix::Identity(3, 3));
  REQUIRE(spec.eigenvalues.size() == 3);
  for (Index i = 0; i < 3; ++i)
    CHECK(spec.eigenvalues(i) == Catch::Approx(1.0));
  CHECK(spec.rank() == 3);
}

TEST_CASE("spectral decomposition of the joined shrinking effect") {
  // B_1 = (1/2)|10><10| + |11><11| on two qubits: ranks drop to 2.
  ComplexMatrix b = ComplexMatrix::Zero(4, 4);
  b(2, 2) = 0.5;
  b(3, 3) = 1.0;
  const Spectrum spec = spectral_decomposition(b);
  CHECK(spec.eigenvalues(0) == Catch::Approx(1.0));
  CHECK(spec.eigenvalues(1) == Catch::Approx(0.5));
  CHECK(spec.eigenvalues(2) == Catch::Approx(0.0).margin(1e-14));
  CHECK(spec.eigenvalues(3) == Catch::Approx(0.0).margin(1e-14));
  CHECK(spec.rank() == 2);
}

TEST_CASE("spectral decomposition reconstructs random Hermitian input") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = testing::random_hermitian(rng, 4);
    const Spectrum spec = spectral_decomposition(h);
    const ComplexMatrix rebuilt = spec.eigenvectors *
                                  spec.eigenvalues.asDiagonal() *
                                  spec.eigenvectors.adjoint();
    REQUIRE((h - rebuilt).norm() < 1e-10 * h.norm());
    REQUIRE((spec.eigenvectors.adjoint() * spec.eigenvectors -
             ComplexMatrix::Identity(4, 4))
                .norm() < 1e-12);
  }
}

TEST_CASE("spectral decomposition rejects bad input") {
  CHECK_THROWS_AS(spectral_decomposition(ComplexMatrix::Zero(2, 3)),
                  std::invalid_argument);
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(spectral_decomposition(m), std::invalid_argument);
}

TEST_CASE("matrix_power inverts the printed square root") {
  // B_0 of the three-outcome example has sqrt(B_0) = P0/sqrt2 + P1 + P2/sqrt2,
  // so B_0^{-1/2} = sqrt2 P0 + P1 + sqrt2 P2.
  const double s2 = std::sqrt(2.0);
  const ComplexMatrix b0 = diag3(0.5, 1.0, 0.5);
  const ComplexMatrix expected = diag3(s2, 1.0, s2);
  REQUIRE((matrix_power(b0, -0.5) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("matrix_power of the identity") {
  for (double gamma : {-1.0, -0.5, 0.0, 0.5, 2.0})
    CHECK((matrix_power(ComplexMatrix::Identity(4, 4), gamma) -
           ComplexMatrix::Identity(4, 4))
              .norm() < 1e-14);
}

TEST_CASE("matrix_power square root squares back") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = testing::random_psd(rng, 4);
    const ComplexMatrix root = matrix_power(h, 0.5);
    REQUIRE((root * root - h).norm() < 1e-10 * std::max(1.0, h.norm()));
  }
}

TEST_CASE("matrix_power power additivity on a common support") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = testing::random_psd(rng, 4, 3);  // rank deficient
    const ComplexMatrix a = matrix_power(h, 0.7);
    const ComplexMatrix b = matrix_power(h, -0.2);
    const ComplexMatrix c = matrix_power(h, 0.5);
    REQUIRE((a * b - c).norm() < 1e-9 * std::max(1.0, c.norm()));
  }
}

TEST_CASE("matrix_power rejects indefinite input") {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  CHECK_THROWS_AS(matrix_power(m, 0.5), std::domain_error);
}

TEST_CASE("pauli_power projects out the negative axis") {
  const ComplexMatrix h =
      0.5 * ComplexMatrix::Identity(2, 2) + 0.5 * pauli_z();
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  REQUIRE((pauli_power(h, 0.5) - p0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pauli_power reproduces the closed-form marginal root") {
  const ExampleParams sic = ExampleParams::sic();
  const Povm a = qubit4_povm(sic);
  const ComplexMatrix b0 = a.effects[0] + a.effects[1];
  const Qubit4ClosedForms forms = qubit4_closed_forms(sic);
  REQUIRE((pauli_power(b0, 0.5) - forms.step1[0]).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("pauli_power agrees with matrix_power") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const ComplexMatrix h = testing::random_psd(rng, 2);
    for (double gamma : {0.5, -0.5, 2.0})
      REQUIRE((pauli_power(h, gamma) - matrix_power(h, gamma))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
  }
}

TEST_CASE("pauli_power rejects other dimensions") {
  CHECK_THROWS_AS(pauli_power(ComplexMatrix::Identity(3, 3), 0.5),
                  std::invalid_argument);
}

TEST_CASE("support projector of the identity and of B_1") {
  CHECK((support_projector(ComplexMatrix::Identity(3, 3)) -
         ComplexMatrix::Identity(3, 3))
            .norm() < 1e-14);
  // B_1 = (P_2 + P_0)/2 from the three-outcome example.
  const ComplexMatrix b1 = diag3(0.5, 0.0, 0.5);
  const ComplexMatrix expected = diag3(1.0, 0.0, 1.0);
  CHECK((support_projector(b1) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("support of a sum spans both supports") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 4;
    const ComplexMatrix a = testing::random_psd(rng, n, rng.pick(1, 3));
    const ComplexMatrix b = testing::random_psd(rng, n, rng.pick(1, 3));
    const Spectrum sa = spectral_decomposition(a);
    const Spectrum sb = spectral_decomposition(b);
    ComplexMatrix joined(n, sa.rank() + sb.rank());
    joined << sa.eigenvectors.leftCols(sa.rank()),
        sb.eigenvectors.leftCols(sb.rank());
    const Index span_rank = svd(joined).rank();
    const Index sum_rank = spectral_decomposition(a + b).rank();
    REQUIRE(sum_rank == span_rank);
  }
}

TEST_CASE("projector annihilates nothing of the power") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix h = testing::random_psd(rng, 4, rng.pick(1, 3));
    const ComplexMatrix pi = support_projector(h);
    for (double gamma : {0.5, -0.5})
      REQUIRE((pi * matrix_power(h, gamma) - matrix_power(h, gamma)).norm() <
              1e-11);
  }
}

TEST_CASE("kernel vectors have vanishing expectation and conversely") {
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 4;
    const Index rank = rng.pick(1, 3);
    const ComplexMatrix d = testing::random_psd(rng, n, rank);
    const Spectrum spec = spectral_decomposition(d);
    const ComplexVector in_kernel = spec.eigenvectors.col(n - 1);
    const ComplexVector in_support = spec.eigenvectors.col(0);
    CHECK(std::abs((in_kernel.adjoint() * d * in_kernel)(0)) < 1e-12);
    CHECK((d * in_kernel).norm() < 1e-6);
    CHECK(std::abs((in_support.adjoint() * d * in_support)(0)) > 1e-6);
  }
}

TEST_CASE("svd of a projector and of the shrinking Kraus operator") {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  const Svd sp = svd(p0);
  REQUIRE(sp.rank() == 1);
  CHECK(sp.singular_values(0) == Catch::Approx(1.0));

  // K2 = (|0><01| + |1><10|)/sqrt2 from the two-qubit shrinking instrument.
  const Instrument shrink = shrinking_instrument();
  const Svd sk = svd(shrink.operations[1][0]);
  REQUIRE(sk.rank() == 2);
  CHECK(sk.singular_values(0) == Catch::Approx(1.0 / std::sqrt(2.0)));
  CHECK(sk.singular_values(1) == Catch::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("svd reconstructs random rectangular input") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix t = testing::random_matrix(rng, 3, 5);
    const Svd s = svd(t);
    const ComplexMatrix rebuilt =
        s.left * s.singular_values.asDiagonal() * s.right.adjoint();
    REQUIRE((t - rebuilt).norm() < 1e-10 * t.norm());
  }
}

TEST_CASE("complete_basis extends to a unitary") {
  Rng rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 5;
    const ComplexMatrix u = testing::random_unitary(rng, n);
    const Index keep = rng.pick(0, n);
    const ComplexMatrix full = complete_basis(u.leftCols(keep), n);
    REQUIRE((full.adjoint() * full - ComplexMatrix::Identity(n, n)).norm() <
            1e-10);
    if (keep > 0) REQUIRE((full.leftCols(keep) - u.leftCols(keep)).norm() == 0.0);
  }
}

TEST_CASE("eigenvector phases are deterministic") {
  Rng rng(61);
  const ComplexMatrix h = testing::random_hermitian(rng, 4);
  const Spectrum a = spectral_decomposition(h);
  const Spectrum b = spectral_decomposition(h);
  REQUIRE((a.eigenvectors - b.eigenvectors).norm() == 0.0);
  for (Index i = 0; i < 4; ++i) {
    Index best = 0;
    a.eigenvectors.col(i).cwiseAbs().maxCoeff(&best);
    CHECK(std::abs(std::arg(a.eigenvectors(best, i))) < 1e-12);
  }
}
