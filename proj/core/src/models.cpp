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
#include "seqfisher/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "seqfisher/errors.hpp"

namespace seqfisher {

namespace {

constexpr double kProjectorTolerance = 1e-12;
constexpr double kCoherentTailLimit = 1e-8;

// Dense spin chains beyond this size are outside what the library targets.
constexpr int kMaxChainSites = 12;
constexpr int kMaxLindbladSites = 5;

[[noreturn]] void invalid(std::string_view field, const std::string& constraint) {
    throw ConfigError("invalid model field '" + std::string(field) + "': " + constraint);
}

bool is_chain(ModelFamily f) {
    return f == ModelFamily::heisenberg || f == ModelFamily::ising || f == ModelFamily::lindblad_chain;
}

}  // namespace

std::string_view to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::heisenberg: return "heisenberg";
        case ModelFamily::ising: return "ising";
        case ModelFamily::jaynes_cummings: return "jaynes_cummings";
        case ModelFamily::lindblad_chain: return "lindblad_chain";
        case ModelFamily::random_unitary: return "random_unitary";
    }
    return "unknown";
}

ModelFamily model_family_from_string(std::string_view name) {
    for (auto f : {ModelFamily::heisenberg, ModelFamily::ising, ModelFamily::jaynes_cummings,
                   ModelFamily::lindblad_chain, ModelFamily::random_unitary}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw ConfigError("unknown model family '" + std::string(name) + "'");
}

std::vector<std::string> estimable_parameters(ModelFamily family) {
    switch (family) {
        case ModelFamily::heisenberg:
        case ModelFamily::ising: return {"B", "J"};
        case ModelFamily::jaynes_cummings: return {"Omega", "omega"};
        case ModelFamily::lindblad_chain: return {"kappa", "J", "B", "n_th"};
        case ModelFamily::random_unitary: return {};
    }
    return {};
}

double ModelSpec::parameter(std::string_view name) const {
    if (name == "J") return J;
    if (name == "B") return B;
    if (name == "omega") return omega;
    if (name == "Omega") return Omega;
    if (name == "kappa") return kappa;
    if (name == "n_th") return n_th;
    throw ConfigError("unknown model parameter '" + std::string(name) + "'");
}

ModelSpec ModelSpec::with_parameter(std::string_view name, double value) const {
    ModelSpec out = *this;
    if (name == "J") out.J = value;
    else if (name == "B") out.B = value;
    else if (name == "omega") out.omega = value;
    else if (name == "Omega") out.Omega = value;
    else if (name == "kappa") out.kappa = value;
    else if (name == "n_th") out.n_th = value;
    else throw ConfigError("unknown model parameter '" + std::string(name) + "'");
    return out;
}

int ModelSpec::fock_cutoff() const {
    if (family != ModelFamily::jaynes_cummings) {
        throw ConfigError("fock_cutoff: model is not Jaynes-Cummings");
    }
    return size > 0 ? size : default_fock_cutoff(alpha);
}

SubsystemLayout ModelSpec::layout() const {
    if (family == ModelFamily::jaynes_cummings) {
        return SubsystemLayout({2, fock_cutoff() + 1});
    }
    return SubsystemLayout::qubits(size);
}

void ModelSpec::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        invalid("tau", "must be a positive finite time");
    }
    for (auto [name, value] : {std::pair<std::string_view, double>{"J", J}, {"B", B}, {"omega", omega},
                               {"Omega", Omega}, {"kappa", kappa}, {"n_th", n_th}, {"alpha", alpha}}) {
        if (!std::isfinite(value)) {
            invalid(name, "must be finite");
        }
    }
    if (is_chain(family)) {
        if (size < 2) {
            invalid("N", "chains need N >= 2");
        }
        const int cap = family == ModelFamily::lindblad_chain ? kMaxLindbladSites : kMaxChainSites;
        if (size > cap) {
            invalid("N", "dense simulation supports N <= " + std::to_string(cap));
        }
        if (!(J > 0.0)) {
            invalid("J", "exchange coupling must be > 0");
        }
    }
    if (family == ModelFamily::random_unitary && (size < 1 || size > kMaxChainSites)) {
        invalid("N", "random_unitary needs 1 <= N <= " + std::to_string(kMaxChainSites));
    }
    if (family == ModelFamily::lindblad_chain) {
        if (kappa < 0.0) {
            invalid("kappa", "decay rate must be >= 0");
        }
        if (n_th < 0.0) {
            invalid("n_th", "mean bath excitation must be >= 0");
        }
    }
    if (family == ModelFamily::jaynes_cummings) {
        if (size < 0) {
            invalid("n_max", "Fock cutoff must be >= 1 (or 0 for the default)");
        }
        if (alpha < 0.0) {
            invalid("alpha", "coherent amplitude must be >= 0");
        }
        const int n_max = fock_cutoff();
        if (n_max < 1) {
            invalid("n_max", "Fock cutoff must be >= 1");
        }
        if (coherent_truncation_error(alpha, n_max) > kCoherentTailLimit) {
            invalid("n_max", "truncation discards more than 1e-8 of the coherent state; use n_max >= " +
                                 std::to_string(default_fock_cutoff(alpha)));
        }
    }
    const auto allowed = estimable_parameters(family);
    if (lambda_name.empty()) {
        if (!allowed.empty()) {
            invalid("lambda_name", "an estimated parameter is required for this family");
        }
    } else if (std::find(allowed.begin(), allowed.end(), lambda_name) == allowed.end()) {
        invalid("lambda_name", "'" + lambda_name + "' is not an estimable parameter of " +
                                   std::string(to_string(family)));
    }
}

// ---------------------------------------------------------------------------

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

ComplexMatrix sigma_plus() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    return m;
}

ComplexMatrix sigma_minus() {
    ComplexMatrix m(2, 2);
    m << 0, 0, 1, 0;
    return m;
}

ComplexMatrix build_heisenberg(int n, double j, double b) {
    if (n < 2) {
        throw ConfigError("build_heisenberg: N must be >= 2");
    }
    const auto layout = SubsystemLayout::qubits(n);
    const int dim = layout.total_dim();
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    const ComplexMatrix paulis[] = {pauli_x(), pauli_y(), pauli_z()};
    for (int site = 0; site + 1 < n; ++site) {
        for (const auto& s : paulis) {
            h -= j * tensor_embed(s, site, layout) * tensor_embed(s, site + 1, layout);
        }
    }
    h += b * tensor_embed(pauli_x(), 0, layout);
    return h;
}

ComplexMatrix build_ising(int n, double j, double b) {
    if (n < 2) {
        throw ConfigError("build_ising: N must be >= 2");
    }
    const auto layout = SubsystemLayout::qubits(n);
    const int dim = layout.total_dim();
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (int site = 0; site + 1 < n; ++site) {
        h -= j * tensor_embed(pauli_z(), site, layout) * tensor_embed(pauli_z(), site + 1, layout);
    }
    for (int site = 0; site < n; ++site) {
        h += b * tensor_embed(pauli_x(), site, layout);
    }
    return h;
}

ComplexMatrix annihilation(int n_max) {
    ComplexMatrix a = ComplexMatrix::Zero(n_max + 1, n_max + 1);
    for (int m = 1; m <= n_max; ++m) {
        a(m - 1, m) = std::sqrt(static_cast<double>(m));
    }
    return a;
}

ComplexMatrix build_jc(double omega, double coupling, int n_max) {
    if (n_max < 1) {
        throw ConfigError("build_jc: n_max must be >= 1");
    }
    const ComplexMatrix a = annihilation(n_max);
    const ComplexMatrix ad = a.adjoint();
    const ComplexMatrix id_atom = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix id_field = ComplexMatrix::Identity(n_max + 1, n_max + 1);
    ComplexMatrix h = omega * kron(id_atom, ad * a);
    h += 0.5 * omega * kron(pauli_z(), id_field);
    h += coupling * (kron(sigma_plus(), a) + kron(sigma_minus(), ad));
    return h;
}

ComplexMatrix build_lindblad_superop(const ComplexMatrix& hamiltonian, double kappa, double n_th,
                                     const SubsystemLayout& layout) {
    if (!is_hermitian(hamiltonian)) {
        throw ConfigError("build_lindblad_superop: Hamiltonian is not Hermitian");
    }
    if (kappa < 0.0) {
        throw ConfigError("invalid model field 'kappa': decay rate must be >= 0");
    }
    if (n_th < 0.0) {
        throw ConfigError("invalid model field 'n_th': mean bath excitation must be >= 0");
    }
    const int dim = layout.total_dim();
    if (hamiltonian.rows() != dim) {
        throw ConfigError("build_lindblad_superop: Hamiltonian does not match layout");
    }
    const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
    const Complex i(0.0, 1.0);
    ComplexMatrix l = -i * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));

    auto add_dissipator = [&](const ComplexMatrix& op, double rate) {
        if (rate == 0.0) {
            return;
        }
        const ComplexMatrix odo = op.adjoint() * op;
        l += rate * (kron(op.conjugate(), op) - 0.5 * kron(id, odo) - 0.5 * kron(odo.transpose(), id));
    };
    for (int site = 0; site < layout.sites(); ++site) {
        if (layout.local_dim(site) != 2) {
            throw ConfigError("build_lindblad_superop: dissipators require qubit sites");
        }
        add_dissipator(tensor_embed(sigma_minus(), site, layout), kappa * (1.0 + n_th));
        add_dissipator(tensor_embed(sigma_plus(), site, layout), kappa * n_th);
    }
    return l;
}

ComplexMatrix lindblad_propagator(const ComplexMatrix& liouvillian, double tau) {
    if (liouvillian.rows() != liouvillian.cols()) {
        throw ConfigError("lindblad_propagator: Liouvillian must be square");
    }
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(liouvillian.rows()))));
    if (n * n != liouvillian.rows()) {
        throw ConfigError("lindblad_propagator: dimension is not a perfect square");
    }
    if (tau == 0.0) {
        return ComplexMatrix::Identity(liouvillian.rows(), liouvillian.cols());
    }
    const ComplexMatrix scaled = tau * liouvillian;
    return scaled.exp();
}

ComplexVector vec(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) {
        throw ConfigError("unvec: length is not a perfect square");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

// ---------------------------------------------------------------------------

int default_fock_cutoff(double alpha) {
    return static_cast<int>(std::ceil(alpha * alpha + 6.0 * alpha + 10.0));
}

double coherent_truncation_error(double alpha, int n_max) {
    if (alpha == 0.0) {
        return 0.0;
    }
    const double a2 = alpha * alpha;
    double tail = 0.0;
    for (int m = n_max + 1;; ++m) {
        const double term = std::exp(-a2 + m * std::log(a2) - std::lgamma(m + 1.0));
        tail += term;
        if (m > a2 && term < 1e-18 * std::max(tail, 1e-300)) {
            break;
        }
        if (m > n_max + 100000) {
            break;
        }
    }
    return tail;
}

ProbeState coherent_state(double alpha, int n_max) {
    if (n_max < 0) {
        throw ConfigError("coherent_state: n_max must be >= 0");
    }
    if (coherent_truncation_error(alpha, n_max) > kCoherentTailLimit) {
        throw ConfigError("coherent_state: n_max = " + std::to_string(n_max) +
                          " truncates more than 1e-8 of |alpha|^2 = " + std::to_string(alpha * alpha) +
                          "; use n_max >= " + std::to_string(default_fock_cutoff(alpha)));
    }
    ComplexVector c(n_max + 1);
    double amp = std::exp(-0.5 * alpha * alpha);
    c(0) = amp;
    for (int m = 1; m <= n_max; ++m) {
        amp *= alpha / std::sqrt(static_cast<double>(m));
        c(m) = amp;
    }
    c /= c.norm();
    return ProbeState::pure(std::move(c));
}

// ---------------------------------------------------------------------------

std::string_view to_string(MeasurementBasis basis) {
    switch (basis) {
        case MeasurementBasis::sigma_z: return "sigma_z";
        case MeasurementBasis::sigma_x: return "sigma_x";
        case MeasurementBasis::custom: return "custom";
        case MeasurementBasis::none: return "none";
    }
    return "unknown";
}

MeasurementScheme::MeasurementScheme(SubsystemLayout layout, int site, std::vector<ComplexMatrix> projectors,
                                     MeasurementBasis basis)
    : layout_(std::move(layout)), site_(site), basis_(basis), local_(std::move(projectors)) {
    const int d = layout_.local_dim(site_);
    if (local_.empty()) {
        throw ConfigError("MeasurementScheme: at least one projector is required");
    }
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < local_.size(); ++k) {
        const ComplexMatrix& p = local_[k];
        if (p.rows() != d || p.cols() != d) {
            throw ConfigError("MeasurementScheme: projector dimension does not match site");
        }
        if (!is_hermitian(p, kProjectorTolerance)) {
            throw ConfigError("MeasurementScheme: projector is not Hermitian");
        }
        if (max_abs_diff(p * p, p) > kProjectorTolerance) {
            throw ConfigError("MeasurementScheme: projector is not idempotent");
        }
        for (std::size_t q = k + 1; q < local_.size(); ++q) {
            if ((p * local_[q]).cwiseAbs().maxCoeff() > kProjectorTolerance) {
                throw ConfigError("MeasurementScheme: projectors are not mutually orthogonal");
            }
        }
        sum += p;
    }
    if (max_abs_diff(sum, ComplexMatrix::Identity(d, d)) > kProjectorTolerance) {
        throw ConfigError("MeasurementScheme: projectors do not sum to the identity");
    }
    embedded_.reserve(local_.size());
    for (const auto& p : local_) {
        embedded_.push_back(tensor_embed(p, site_, layout_));
    }
}

MeasurementScheme MeasurementScheme::sigma_z(SubsystemLayout layout, int site) {
    const int d = layout.local_dim(site);
    if (d != 2) {
        throw ConfigError("sigma_z measurement needs a two-level site");
    }
    return custom(std::move(layout), site, ComplexMatrix::Identity(2, 2)).with_basis(MeasurementBasis::sigma_z);
}

MeasurementScheme MeasurementScheme::sigma_x(SubsystemLayout layout, int site) {
    const int d = layout.local_dim(site);
    if (d != 2) {
        throw ConfigError("sigma_x measurement needs a two-level site");
    }
    ComplexMatrix hadamard(2, 2);
    hadamard << 1, 1, 1, -1;
    hadamard *= M_SQRT1_2;
    return custom(std::move(layout), site, hadamard).with_basis(MeasurementBasis::sigma_x);
}

MeasurementScheme MeasurementScheme::custom(SubsystemLayout layout, int site, const ComplexMatrix& basis) {
    const int d = layout.local_dim(site);
    if (basis.rows() != d || basis.cols() != d) {
        throw ConfigError("custom measurement basis must be a square matrix of the local dimension");
    }
    if (unitarity_error(basis) > kProjectorTolerance) {
        throw ConfigError("custom measurement basis is not orthonormal");
    }
    std::vector<ComplexMatrix> projectors;
    projectors.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        projectors.push_back(basis.col(k) * basis.col(k).adjoint());
    }
    return MeasurementScheme(std::move(layout), site, std::move(projectors), MeasurementBasis::custom);
}

MeasurementScheme MeasurementScheme::from_projectors(SubsystemLayout layout, int site,
                                                     std::vector<ComplexMatrix> projectors,
                                                     MeasurementBasis basis) {
    return MeasurementScheme(std::move(layout), site, std::move(projectors), basis);
}

MeasurementScheme MeasurementScheme::none(SubsystemLayout layout) {
    const int d = layout.local_dim(0);
    return MeasurementScheme(std::move(layout), 0, {ComplexMatrix::Identity(d, d)}, MeasurementBasis::none);
}

MeasurementScheme MeasurementScheme::with_basis(MeasurementBasis basis) && {
    basis_ = basis;
    return std::move(*this);
}

const ComplexMatrix& MeasurementScheme::local_projector(int outcome) const {
    return local_.at(static_cast<std::size_t>(outcome));
}

const ComplexMatrix& MeasurementScheme::projector(int outcome) const {
    return embedded_.at(static_cast<std::size_t>(outcome));
}

double MeasurementScheme::probability(const ComplexVector& psi, int outcome) const {
    const ComplexMatrix& p = local_[static_cast<std::size_t>(outcome)];
    const int d = static_cast<int>(p.rows());
    const int right = layout_.stride(site_);
    const int left = layout_.total_dim() / (d * right);
    double acc = 0.0;
    for (int l = 0; l < left; ++l) {
        const int base = l * d * right;
        for (int r = 0; r < right; ++r) {
            for (int i = 0; i < d; ++i) {
                Complex row = 0.0;
                for (int j = 0; j < d; ++j) {
                    row += p(i, j) * psi(base + j * right + r);
                }
                acc += (std::conj(psi(base + i * right + r)) * row).real();
            }
        }
    }
    return acc;
}

double MeasurementScheme::probability(const ComplexMatrix& rho, int outcome) const {
    const ComplexMatrix& p = embedded_[static_cast<std::size_t>(outcome)];
    // tr(P rho) = sum_ij P_ij rho_ji
    return (p.transpose().cwiseProduct(rho)).sum().real();
}

void MeasurementScheme::project(ComplexVector& psi, int outcome, ComplexVector& scratch) const {
    apply_local(local_[static_cast<std::size_t>(outcome)], site_, layout_, psi, scratch);
    psi.swap(scratch);
}

void MeasurementScheme::project(ComplexMatrix& rho, int outcome, ComplexMatrix& scratch) const {
    const ComplexMatrix& p = embedded_[static_cast<std::size_t>(outcome)];
    scratch.noalias() = p * rho;
    rho.noalias() = scratch * p;
}

// ---------------------------------------------------------------------------

MeasurementScheme make_scheme(const ModelSpec& spec, MeasurementBasis basis, std::optional<int> site) {
    const SubsystemLayout layout = spec.layout();
    int s = 0;
    if (site) {
        s = *site;
    } else if (is_chain(spec.family)) {
        s = layout.sites() - 1;
    }
    layout.local_dim(s);
    switch (basis) {
        case MeasurementBasis::sigma_z: return MeasurementScheme::sigma_z(layout, s);
        case MeasurementBasis::sigma_x: return MeasurementScheme::sigma_x(layout, s);
        case MeasurementBasis::none: return MeasurementScheme::none(layout);
        case MeasurementBasis::custom: break;
    }
    throw ConfigError("make_scheme: custom bases need explicit projectors");
}

ProbeState fock_state(int m, int n_max) {
    if (n_max < 1 || m < 0 || m > n_max) {
        throw ConfigError("fock_state: need 0 <= m <= n_max and n_max >= 1");
    }
    return ProbeState::basis(n_max + 1, m);
}

ProbeState jc_product_state(bool atom_excited, const ComplexVector& field) {
    const auto levels = field.size();
    if (levels < 2) {
        throw ConfigError("jc_product_state: field needs at least two levels");
    }
    ComplexVector psi = ComplexVector::Zero(2 * levels);
    psi.segment(atom_excited ? 0 : levels, levels) = field;
    return ProbeState::pure(std::move(psi));
}

MeasurementScheme default_scheme(const ModelSpec& spec) {
    const auto basis = spec.family == ModelFamily::ising ? MeasurementBasis::sigma_x : MeasurementBasis::sigma_z;
    return make_scheme(spec, basis, std::nullopt);
}

ProbeState default_initial_state(const ModelSpec& spec) {
    const SubsystemLayout layout = spec.layout();
    const int dim = layout.total_dim();
    switch (spec.family) {
        case ModelFamily::heisenberg:
        case ModelFamily::ising:
        case ModelFamily::random_unitary: return ProbeState::basis(dim, dim - 1);
        case ModelFamily::lindblad_chain: {
            ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
            rho(dim - 1, dim - 1) = 1.0;
            return ProbeState::mixed(std::move(rho));
        }
        case ModelFamily::jaynes_cummings: {
            const int n_max = spec.fock_cutoff();
            (void)dim;
            return jc_product_state(false, coherent_state(spec.alpha, n_max).vector());
        }
    }
    throw ConfigError("default_initial_state: unknown family");
}

ComplexMatrix hamiltonian(const ModelSpec& spec) {
    switch (spec.family) {
        case ModelFamily::heisenberg:
        case ModelFamily::lindblad_chain: return build_heisenberg(spec.size, spec.J, spec.B);
        case ModelFamily::ising: return build_ising(spec.size, spec.J, spec.B);
        case ModelFamily::jaynes_cummings: return build_jc(spec.omega, spec.Omega, spec.fock_cutoff());
        case ModelFamily::random_unitary: break;
    }
    throw ConfigError("hamiltonian: random_unitary has no Hamiltonian");
}

}  // namespace seqfisher
