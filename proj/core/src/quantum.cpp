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
#include "seqfisher/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqfisher/errors.hpp"
#include "seqfisher/random.hpp"

namespace seqfisher {

SubsystemLayout::SubsystemLayout(std::vector<int> local_dims) : dims_(std::move(local_dims)) {
    if (dims_.empty()) {
        throw ConfigError("SubsystemLayout: at least one site is required");
    }
    total_ = 1;
    for (int d : dims_) {
        if (d < 1) {
            throw ConfigError("SubsystemLayout: local dimensions must be positive");
        }
        total_ *= d;
    }
}

SubsystemLayout SubsystemLayout::qubits(int n) {
    return SubsystemLayout(std::vector<int>(static_cast<std::size_t>(n), 2));
}

int SubsystemLayout::local_dim(int site) const {
    if (site < 0 || site >= sites()) {
        throw ConfigError("site " + std::to_string(site) + " out of range for a layout with " +
                          std::to_string(sites()) + " sites");
    }
    return dims_[static_cast<std::size_t>(site)];
}

int SubsystemLayout::stride(int site) const {
    local_dim(site);
    int s = 1;
    for (int k = site + 1; k < sites(); ++k) {
        s *= dims_[static_cast<std::size_t>(k)];
    }
    return s;
}

// ---------------------------------------------------------------------------

ProbeState ProbeState::pure(ComplexVector amplitudes) {
    if (amplitudes.size() == 0) {
        throw ConfigError("ProbeState: empty state vector");
    }
    if (std::abs(amplitudes.squaredNorm() - 1.0) > kStructureTolerance) {
        throw ConfigError("ProbeState: pure state is not normalized");
    }
    return ProbeState(std::move(amplitudes));
}

ProbeState ProbeState::mixed(ComplexMatrix density) {
    if (density.rows() == 0 || density.rows() != density.cols()) {
        throw ConfigError("ProbeState: density matrix must be square and non-empty");
    }
    if (!is_hermitian(density)) {
        throw ConfigError("ProbeState: density matrix is not Hermitian");
    }
    if (std::abs(density.trace() - Complex(1.0)) > kStructureTolerance) {
        throw ConfigError("ProbeState: density matrix does not have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(density, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kStructureTolerance) {
        throw ConfigError("ProbeState: density matrix has a negative eigenvalue");
    }
    return ProbeState(std::move(density));
}

ProbeState ProbeState::basis(int dim, int index) {
    if (dim < 1 || index < 0 || index >= dim) {
        throw ConfigError("ProbeState::basis: index out of range");
    }
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = 1.0;
    return ProbeState(std::move(v));
}

int ProbeState::dim() const {
    if (const auto* v = std::get_if<ComplexVector>(&data_)) {
        return static_cast<int>(v->size());
    }
    return static_cast<int>(std::get<ComplexMatrix>(data_).rows());
}

const ComplexVector& ProbeState::vector() const {
    if (const auto* v = std::get_if<ComplexVector>(&data_)) {
        return *v;
    }
    throw ConfigError("ProbeState: mixed state has no state vector");
}

const ComplexMatrix& ProbeState::density() const {
    if (const auto* m = std::get_if<ComplexMatrix>(&data_)) {
        return *m;
    }
    throw ConfigError("ProbeState: pure state stored as a vector; use to_density()");
}

ComplexMatrix ProbeState::to_density() const {
    if (const auto* v = std::get_if<ComplexVector>(&data_)) {
        return (*v) * v->adjoint();
    }
    return std::get<ComplexMatrix>(data_);
}

// ---------------------------------------------------------------------------

bool is_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return max_abs_diff(m, m.adjoint()) < tol;
}

double unitarity_error(const ComplexMatrix& u) {
    const ComplexMatrix id = ComplexMatrix::Identity(u.rows(), u.cols());
    return max_abs_diff(u.adjoint() * u, id);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ConfigError("max_abs_diff: shape mismatch");
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix tensor_embed(const ComplexMatrix& op, int site, const SubsystemLayout& layout) {
    const int d = layout.local_dim(site);
    if (op.rows() != d || op.cols() != d) {
        throw ConfigError("tensor_embed: operator dimension " + std::to_string(op.rows()) + "x" +
                          std::to_string(op.cols()) + " does not match local dimension " +
                          std::to_string(d) + " at site " + std::to_string(site));
    }
    const int right = layout.stride(site);
    const int left = layout.total_dim() / (d * right);
    const ComplexMatrix id_left = ComplexMatrix::Identity(left, left);
    const ComplexMatrix id_right = ComplexMatrix::Identity(right, right);
    return kron(kron(id_left, op), id_right);
}

void apply_local(const ComplexMatrix& op, int site, const SubsystemLayout& layout,
                 const ComplexVector& in, ComplexVector& out) {
    const int d = layout.local_dim(site);
    const int right = layout.stride(site);
    const int left = layout.total_dim() / (d * right);
    out.resize(in.size());
    for (int l = 0; l < left; ++l) {
        const int base = l * d * right;
        for (int r = 0; r < right; ++r) {
            for (int i = 0; i < d; ++i) {
                Complex acc = 0.0;
                for (int j = 0; j < d; ++j) {
                    acc += op(i, j) * in(base + j * right + r);
                }
                out(base + i * right + r) = acc;
            }
        }
    }
}

// ---------------------------------------------------------------------------

HermitianSpectrum::HermitianSpectrum(const ComplexMatrix& hamiltonian) {
    if (!is_hermitian(hamiltonian)) {
        throw ConfigError("unitary_propagator: Hamiltonian is not Hermitian");
    }
    // Symmetrize so the solver sees an exactly Hermitian matrix.
    const ComplexMatrix h = 0.5 * (hamiltonian + hamiltonian.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalError("HermitianSpectrum: eigendecomposition failed");
    }
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

ComplexMatrix HermitianSpectrum::propagator(double tau) const {
    ComplexVector phases(energies_.size());
    for (Eigen::Index k = 0; k < energies_.size(); ++k) {
        phases(k) = std::polar(1.0, -tau * energies_(k));
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

ComplexMatrix unitary_propagator(const ComplexMatrix& hamiltonian, double tau) {
    return HermitianSpectrum(hamiltonian).propagator(tau);
}

// ---------------------------------------------------------------------------

namespace {

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const ProbeState& a, const ProbeState& b) {
    if (a.dim() != b.dim()) {
        throw ConfigError("fidelity: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()) + ")");
    }
    double f = 0.0;
    if (a.is_pure() && b.is_pure()) {
        f = std::norm(a.vector().dot(b.vector()));
    } else if (a.is_pure()) {
        f = (a.vector().adjoint() * b.density() * a.vector())(0).real();
    } else if (b.is_pure()) {
        f = (b.vector().adjoint() * a.density() * b.vector())(0).real();
    } else {
        const ComplexMatrix root = psd_sqrt(a.density());
        const ComplexMatrix inner = root * b.density() * root;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (inner + inner.adjoint()),
                                                        Eigen::EigenvaluesOnly);
        const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
        f = tr * tr;
    }
    return std::clamp(f, 0.0, 1.0);
}

double singular_ratio(const ComplexMatrix& m) {
    if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) {
        throw ConfigError("singular_ratio: matrix is zero");
    }
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() < 2) {
        return 0.0;
    }
    return std::clamp(s(1) / s(0), 0.0, 1.0);
}

ComplexMatrix haar_random_unitary(int dim, std::uint64_t seed) {
    if (dim < 1) {
        throw ConfigError("haar_random_unitary: dim must be positive");
    }
    Rng rng = make_rng(seed);
    ComplexMatrix z(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) {
            const double re = standard_normal(rng);
            const double im = standard_normal(rng);
            z(i, j) = Complex(re, im) * M_SQRT1_2;
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Without this phase correction QR does not produce the Haar measure.
    for (int k = 0; k < dim; ++k) {
        const Complex rkk = r(k, k);
        const double mag = std::abs(rkk);
        const Complex phase = mag > 0.0 ? rkk / mag : Complex(1.0);
        q.col(k) *= phase;
    }
    return q;
}

ProbeState random_pure_state(int dim, std::uint64_t seed) {
    if (dim < 1) {
        throw ConfigError("random_pure_state: dim must be positive");
    }
    if (dim == 1) {
        return ProbeState::basis(1, 0);
    }
    Rng rng = make_rng(seed);
    ComplexVector v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        v(i) = Complex(re, im);
    }
    v /= v.norm();
    return ProbeState::pure(std::move(v));
}

ComplexMatrix reduced_density(const ProbeState& state, int keep, const SubsystemLayout& layout) {
    if (state.dim() != layout.total_dim()) {
        throw ConfigError("reduced_density: state dimension does not match layout");
    }
    const int d = layout.local_dim(keep);
    const int right = layout.stride(keep);
    const int left = layout.total_dim() / (d * right);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    if (state.is_pure()) {
        const ComplexVector& psi = state.vector();
        for (int l = 0; l < left; ++l) {
            for (int r = 0; r < right; ++r) {
                const int base = l * d * right + r;
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j) {
                        out(i, j) += psi(base + i * right) * std::conj(psi(base + j * right));
                    }
                }
            }
        }
    } else {
        const ComplexMatrix& rho = state.density();
        for (int l = 0; l < left; ++l) {
            for (int r = 0; r < right; ++r) {
                const int base = l * d * right + r;
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j) {
                        out(i, j) += rho(base + i * right, base + j * right);
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace seqfisher
