// Copyright 2026 The seqfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Dense complex linear algebra for finite-dimensional quantum systems.

#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace seqfisher {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Hermiticity, unitarity and normalization checks.
inline constexpr double kStructureTolerance = 1e-10;

// Probabilities may leave [0, 1] by rounding; beyond this they are an error.
inline constexpr double kProbabilityExcursion = 1e-9;

// Ordered local dimensions of a tensor-product Hilbert space. Site 0 is the
// most significant factor in the Kronecker order.
class SubsystemLayout {
  public:
    SubsystemLayout() = default;
    explicit SubsystemLayout(std::vector<int> local_dims);

    static SubsystemLayout qubits(int n);

    int sites() const { return static_cast<int>(dims_.size()); }
    int local_dim(int site) const;
    int total_dim() const { return total_; }
    // Product of the local dimensions strictly after `site`.
    int stride(int site) const;
    const std::vector<int>& local_dims() const { return dims_; }

    bool operator==(const SubsystemLayout&) const = default;

  private:
    std::vector<int> dims_;
    int total_ = 1;
};

// Normalized state of the full probe: a vector on unitary paths, a density
// matrix on the Lindblad path.
class ProbeState {
  public:
    enum class Kind { pure, mixed };

    // Validating constructors; throw ConfigError when the invariants fail.
    static ProbeState pure(ComplexVector amplitudes);
    static ProbeState mixed(ComplexMatrix density);
    static ProbeState basis(int dim, int index);

    Kind kind() const { return std::holds_alternative<ComplexVector>(data_) ? Kind::pure : Kind::mixed; }
    bool is_pure() const { return kind() == Kind::pure; }
    int dim() const;

    const ComplexVector& vector() const;
    const ComplexMatrix& density() const;
    // Density matrix for either representation (|psi><psi| for pure states).
    ComplexMatrix to_density() const;

  private:
    explicit ProbeState(std::variant<ComplexVector, ComplexMatrix> data) : data_(std::move(data)) {}
    std::variant<ComplexVector, ComplexMatrix> data_;
};

bool is_hermitian(const ComplexMatrix& m, double tol = kStructureTolerance);
// max |U^dagger U - I|
double unitarity_error(const ComplexMatrix& u);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Identity on every factor except `site`, where `op` acts.
ComplexMatrix tensor_embed(const ComplexMatrix& op, int site, const SubsystemLayout& layout);

// out[l, i, r] = sum_j op(i, j) in[l, j, r] for the factor at `site`.
void apply_local(const ComplexMatrix& op, int site, const SubsystemLayout& layout,
                 const ComplexVector& in, ComplexVector& out);

// Eigendecomposition H = V diag(E) V^dagger of a Hermitian matrix, reusable
// for exp(-i tau H) at any tau.
class HermitianSpectrum {
  public:
    explicit HermitianSpectrum(const ComplexMatrix& hamiltonian);

    const Eigen::VectorXd& eigenvalues() const { return energies_; }
    const ComplexMatrix& eigenvectors() const { return vectors_; }
    ComplexMatrix propagator(double tau) const;

  private:
    Eigen::VectorXd energies_;
    ComplexMatrix vectors_;
};

// exp(-i tau H). Rejects non-Hermitian input with ConfigError.
ComplexMatrix unitary_propagator(const ComplexMatrix& hamiltonian, double tau);

// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2; |<a|b>|^2 for pure states.
double fidelity(const ProbeState& a, const ProbeState& b);

// s2 / s1 from the full SVD. Throws ConfigError on the zero matrix.
double singular_ratio(const ComplexMatrix& m);

ComplexMatrix haar_random_unitary(int dim, std::uint64_t seed);
ProbeState random_pure_state(int dim, std::uint64_t seed);

// Partial trace over every site except `keep`.
ComplexMatrix reduced_density(const ProbeState& state, int keep, const SubsystemLayout& layout);

}  // namespace seqfisher
