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

// Builders for the physical probes: Heisenberg and Ising chains,
// Jaynes-Cummings atom-field system, dissipative chain Liouvillian.
//
// Conventions: hbar = 1, sigma_z = diag(1, -1), so basis index 0 is spin up
// (or the excited atomic level |e>) and index 1 is spin down (|g>). Chains
// use open boundaries. The Jaynes-Cummings layout is [atom, field].

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqfisher/quantum.hpp"

namespace seqfisher {

enum class ModelFamily { heisenberg, ising, jaynes_cummings, lindblad_chain, random_unitary };

std::string_view to_string(ModelFamily family);
ModelFamily model_family_from_string(std::string_view name);

struct ModelSpec {
    ModelFamily family = ModelFamily::heisenberg;
    // Chain length N (spin chains, random_unitary qubit count) or Fock
    // cutoff n_max (Jaynes-Cummings; 0 selects default_fock_cutoff(alpha)).
    int size = 4;
    double J = 1.0;
    double B = 0.0;
    double omega = 1.0;
    double Omega = 0.1;
    double kappa = 0.0;
    double n_th = 0.0;
    // Real amplitude of the initial coherent field (Jaynes-Cummings only).
    double alpha = 0.0;
    double tau = 1.0;
    // Name of the field treated as the unknown parameter; empty for a
    // parameter-free model (random_unitary).
    std::string lambda_name = "B";
    std::uint64_t unitary_seed = 0;

    // Throws ConfigError naming the offending field.
    void validate() const;

    double parameter(std::string_view name) const;
    ModelSpec with_parameter(std::string_view name, double value) const;
    double lambda() const { return lambda_name.empty() ? 0.0 : parameter(lambda_name); }

    int fock_cutoff() const;
    SubsystemLayout layout() const;
};

// Parameter names admissible as lambda for a family.
std::vector<std::string> estimable_parameters(ModelFamily family);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
// |up><down| and |down><up| in the sigma_z = diag(1,-1) convention.
ComplexMatrix sigma_plus();
ComplexMatrix sigma_minus();

// H = -J sum_j sigma_j . sigma_{j+1} + B sigma_1^x (field on the first site).
ComplexMatrix build_heisenberg(int n, double j, double b);

// H = -J sum_j sigma_j^z sigma_{j+1}^z + B sum_j sigma_j^x.
ComplexMatrix build_ising(int n, double j, double b);

// H = omega a^dagger a + (omega/2) sigma^z + Omega (sigma^+ a + sigma^- a^dagger)
// on the layout [2, n_max + 1].
ComplexMatrix build_jc(double omega, double coupling, int n_max);

// Truncated annihilation operator on n_max + 1 Fock levels.
ComplexMatrix annihilation(int n_max);

// Liouvillian acting on column-stacked vec(rho):
//   -i[H, rho] + kappa sum_i [(1 + n_th) D[sigma_i^-] + n_th D[sigma_i^+]] rho
// with dissipators on every site of the (qubit) layout.
ComplexMatrix build_lindblad_superop(const ComplexMatrix& hamiltonian, double kappa, double n_th,
                                     const SubsystemLayout& layout);

// exp(tau L) by scaling and squaring with a Pade approximant.
ComplexMatrix lindblad_propagator(const ComplexMatrix& liouvillian, double tau);

// vec/unvec with column stacking, matching build_lindblad_superop.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v);

// Smallest cutoff ceil(alpha^2 + 6 alpha + 10).
int default_fock_cutoff(double alpha);
// Poisson tail mass beyond n_max.
double coherent_truncation_error(double alpha, int n_max);
// Truncated and renormalized coherent state |alpha>, alpha real. Throws
// ConfigError when the discarded tail exceeds 1e-8.
ProbeState coherent_state(double alpha, int n_max);
ProbeState fock_state(int m, int n_max);
// Atom (|e> when `atom_excited`, else |g>) times a field vector of length
// n_max + 1, in the [2, n_max + 1] layout.
ProbeState jc_product_state(bool atom_excited, const ComplexVector& field);

enum class MeasurementBasis { sigma_z, sigma_x, custom, none };

std::string_view to_string(MeasurementBasis basis);

// Local projective measurement on one site. Projectors are validated to be
// Hermitian, idempotent, mutually orthogonal and complete within 1e-12.
class MeasurementScheme {
  public:
    static MeasurementScheme sigma_z(SubsystemLayout layout, int site);
    // Hadamard-rotated computational projectors |+><+|, |-><-|.
    static MeasurementScheme sigma_x(SubsystemLayout layout, int site);
    // Columns of `basis` form an orthonormal basis of the local space.
    static MeasurementScheme custom(SubsystemLayout layout, int site, const ComplexMatrix& basis);
    static MeasurementScheme from_projectors(SubsystemLayout layout, int site,
                                             std::vector<ComplexMatrix> projectors,
                                             MeasurementBasis basis = MeasurementBasis::custom);
    // Single identity "outcome": evolution without measurement.
    static MeasurementScheme none(SubsystemLayout layout);

    MeasurementBasis basis() const { return basis_; }
    const SubsystemLayout& layout() const { return layout_; }
    int site() const { return site_; }
    int outcome_count() const { return static_cast<int>(local_.size()); }
    int dim() const { return layout_.total_dim(); }

    const ComplexMatrix& local_projector(int outcome) const;
    // Projector embedded in the full Hilbert space.
    const ComplexMatrix& projector(int outcome) const;

    // <psi|P_k|psi>, unclipped.
    double probability(const ComplexVector& psi, int outcome) const;
    // Re tr(P_k rho), unclipped.
    double probability(const ComplexMatrix& rho, int outcome) const;
    // In-place P_k psi (unnormalized).
    void project(ComplexVector& psi, int outcome, ComplexVector& scratch) const;
    // In-place P_k rho P_k (unnormalized).
    void project(ComplexMatrix& rho, int outcome, ComplexMatrix& scratch) const;

  private:
    MeasurementScheme(SubsystemLayout layout, int site, std::vector<ComplexMatrix> projectors,
                      MeasurementBasis basis);
    MeasurementScheme with_basis(MeasurementBasis basis) &&;

    SubsystemLayout layout_;
    int site_ = 0;
    MeasurementBasis basis_ = MeasurementBasis::custom;
    std::vector<ComplexMatrix> local_;
    std::vector<ComplexMatrix> embedded_;
};

// Default measurement for a model: sigma_z on the last chain site (sigma_x
// for Ising), sigma_z on the atom for Jaynes-Cummings, sigma_z on site 0 for
// random_unitary.
MeasurementScheme default_scheme(const ModelSpec& spec);
MeasurementScheme make_scheme(const ModelSpec& spec, MeasurementBasis basis, std::optional<int> site);

// Initial probe state: |down>^N for chains (as a density matrix on the
// Lindblad path), |g>|alpha> for Jaynes-Cummings.
ProbeState default_initial_state(const ModelSpec& spec);

// Hamiltonian of a unitary family, with the model's current parameter values.
ComplexMatrix hamiltonian(const ModelSpec& spec);

}  // namespace seqfisher
