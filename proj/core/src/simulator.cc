// Copyright 2026 The QFE Authors
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

#include "qfe/simulator.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qfe/error.h"
#include "qfe/rng.h"

namespace qfe {

namespace {

/// Applies a 2^k x 2^k row-major matrix to the bit positions `bits` of a
/// vector of length 2^total_bits. bits[0] is the most significant bit of the
/// local index.
void apply_local(std::span<Complex> vec, int total_bits, std::span<const int> bits, const Complex *mat) {
    const int k = static_cast<int>(bits.size());
    const std::size_t local = std::size_t{1} << k;
    std::array<std::size_t, 16> offsets{};
    for (std::size_t l = 0; l < local; ++l) {
        std::size_t o = 0;
        for (int j = 0; j < k; ++j) {
            if ((l >> (k - 1 - j)) & 1U) {
                o |= std::size_t{1} << bits[j];
            }
        }
        offsets[l] = o;
    }
    std::array<int, 4> sorted{};
    std::copy(bits.begin(), bits.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.begin() + k);

    std::array<Complex, 16> in{};
    const std::size_t outer = std::size_t{1} << (total_bits - k);
    for (std::size_t i = 0; i < outer; ++i) {
        std::size_t base = i;
        for (int j = 0; j < k; ++j) {
            const int b = sorted[j];
            const std::size_t low = base & ((std::size_t{1} << b) - 1);
            base = ((base >> b) << (b + 1)) | low;
        }
        for (std::size_t l = 0; l < local; ++l) {
            in[l] = vec[base + offsets[l]];
        }
        for (std::size_t r = 0; r < local; ++r) {
            Complex acc = 0.0;
            const Complex *row = mat + r * local;
            for (std::size_t c = 0; c < local; ++c) {
                acc += row[c] * in[c];
            }
            vec[base + offsets[r]] = acc;
        }
    }
}

void check_qubits(std::span<const int> qubits, int n, int arity) {
    if (static_cast<int>(qubits.size()) != arity) {
        throw ParameterError("operator arity does not match the number of target qubits");
    }
    for (int q : qubits) {
        if (q < 0 || q >= n) {
            throw ParameterError("qubit index " + std::to_string(q) + " out of range");
        }
    }
    if (arity == 2 && qubits[0] == qubits[1]) {
        throw ParameterError("two-qubit operator applied to a repeated qubit");
    }
}

void check_density_capacity(int n, const SimulatorLimits &limits) {
    if (n > limits.density_qubits) {
        throw CapacityError(std::to_string(n) + " qubits exceed the density-matrix limit of " +
                            std::to_string(limits.density_qubits));
    }
}

void check_statevector_capacity(int n, const SimulatorLimits &limits) {
    if (n > limits.statevector_qubits) {
        throw CapacityError(std::to_string(n) + " qubits exceed the statevector limit of " +
                            std::to_string(limits.statevector_qubits));
    }
}

std::span<const int> op_qubits(const NoisyOp &op) { return std::span<const int>(op.qubits.data(), op.arity); }

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double abs2(Complex z) { return z.real() * z.real() + z.imag() * z.imag(); }

}  // namespace

StateVector::StateVector(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 0 || num_qubits > 40) {
        throw CapacityError("unsupported statevector size " + std::to_string(num_qubits));
    }
    amps_.assign(std::size_t{1} << n_, Complex(0.0));
    amps_[0] = 1.0;
}

void StateVector::apply(const GateMatrix &u, std::span<const int> qubits) {
    check_qubits(qubits, n_, u.qubits);
    std::array<int, 2> bits{};
    for (std::size_t j = 0; j < qubits.size(); ++j) {
        bits[j] = n_ - 1 - qubits[j];
    }
    apply_local(amps_, n_, std::span<const int>(bits.data(), qubits.size()), u.elems.data());
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const Complex &a : amps_) {
        s += abs2(a);
    }
    return s;
}

DensityMatrix::DensityMatrix(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 0 || num_qubits > 16) {
        throw CapacityError("unsupported density-matrix size " + std::to_string(num_qubits));
    }
    rho_.assign(dim() * dim(), Complex(0.0));
    rho_[0] = 1.0;
}

DensityMatrix DensityMatrix::from_pure(const StateVector &psi) {
    DensityMatrix out(psi.num_qubits());
    const auto a = psi.amplitudes();
    for (std::size_t r = 0; r < out.dim(); ++r) {
        for (std::size_t c = 0; c < out.dim(); ++c) {
            out.rho_[r * out.dim() + c] = a[r] * std::conj(a[c]);
        }
    }
    return out;
}

DensityMatrix DensityMatrix::from_elements(int num_qubits, std::vector<Complex> elements) {
    DensityMatrix out(num_qubits);
    if (elements.size() != out.rho_.size()) {
        throw ParameterError("density matrix element count does not match 4^n");
    }
    out.rho_ = std::move(elements);
    return out;
}

void DensityMatrix::apply_unitary(const GateMatrix &u, std::span<const int> qubits) {
    check_qubits(qubits, n_, u.qubits);
    const int k = u.qubits;
    std::array<int, 2> row_bits{};
    std::array<int, 2> col_bits{};
    for (int j = 0; j < k; ++j) {
        row_bits[j] = 2 * n_ - 1 - qubits[j];
        col_bits[j] = n_ - 1 - qubits[j];
    }
    GateMatrix conj_u = u;
    for (auto &e : conj_u.elems) {
        e = std::conj(e);
    }
    apply_local(rho_, 2 * n_, std::span<const int>(row_bits.data(), k), u.elems.data());
    apply_local(rho_, 2 * n_, std::span<const int>(col_bits.data(), k), conj_u.elems.data());
}

void DensityMatrix::apply_channel(const Channel &channel, std::span<const int> qubits) {
    check_qubits(qubits, n_, channel.qubits);
    const int k = channel.qubits;
    const int d = 1 << k;
    const int dd = d * d;
    // Local superoperator S[(r', c'), (r, c)] = sum_K K[r', r] conj(K[c', c]).
    std::vector<Complex> super(static_cast<std::size_t>(dd) * dd, Complex(0.0));
    for (const GateMatrix &kr : channel.kraus) {
        for (int r2 = 0; r2 < d; ++r2) {
            for (int c2 = 0; c2 < d; ++c2) {
                for (int r = 0; r < d; ++r) {
                    for (int c = 0; c < d; ++c) {
                        super[(r2 * d + c2) * dd + (r * d + c)] += kr(r2, r) * std::conj(kr(c2, c));
                    }
                }
            }
        }
    }
    std::array<int, 4> bits{};
    for (int j = 0; j < k; ++j) {
        bits[j] = 2 * n_ - 1 - qubits[j];
        bits[k + j] = n_ - 1 - qubits[j];
    }
    apply_local(rho_, 2 * n_, std::span<const int>(bits.data(), 2 * k), super.data());
}

Complex DensityMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        t += rho_[i * dim() + i];
    }
    return t;
}

double DensityMatrix::purity() const {
    // tr(rho^2) = sum |rho_rc|^2 for Hermitian rho.
    double s = 0.0;
    for (const Complex &e : rho_) {
        s += abs2(e);
    }
    return s;
}

StateVector simulate_ideal(const LatticeCircuit &circuit, const SimulatorLimits &limits) {
    check_statevector_capacity(circuit.num_qubits(), limits);
    StateVector psi(circuit.num_qubits());
    for (int m = 0; m < circuit.depth(); ++m) {
        for (int q = 0; q < circuit.num_qubits(); ++q) {
            const Site s = circuit.site(q);
            const Gate &g = circuit.at(m, s);
            if (g.is_identity()) {
                continue;
            }
            if (is_two_qubit(g.kind)) {
                const std::array<int, 2> qs{q, circuit.qubit(step(s, *g.dir))};
                psi.apply(gate_unitary(g.kind), qs);
            } else {
                const std::array<int, 1> qs{q};
                psi.apply(gate_unitary(g.kind), qs);
            }
        }
    }
    return psi;
}

StateVector ideal_state(const NoisyProgram &program, const SimulatorLimits &limits) {
    check_statevector_capacity(program.num_qubits, limits);
    StateVector psi(program.num_qubits);
    for (const NoisyOp &op : program.ops) {
        if (op.kind == NoisyOp::Kind::Gate) {
            psi.apply(op.unitary, op_qubits(op));
        }
    }
    return psi;
}

DensityMatrix simulate_density(const NoisyProgram &program, const SimulatorLimits &limits) {
    check_density_capacity(program.num_qubits, limits);
    DensityMatrix rho(program.num_qubits);
    for (const NoisyOp &op : program.ops) {
        if (op.kind == NoisyOp::Kind::Depolarize) {
            rho.apply_channel(depolarizing_kraus(op.arity, op.eps), op_qubits(op));
        } else {
            rho.apply_unitary(op.unitary, op_qubits(op));
        }
    }
    return rho;
}

FidelityEstimate simulate_trajectories(const NoisyProgram &program, int shots, std::uint64_t seed,
                                       const SimulatorLimits &limits) {
    if (shots < 1) {
        throw ParameterError("trajectory sampling needs at least one shot");
    }
    check_statevector_capacity(program.num_qubits, limits);
    for (const NoisyOp &op : program.ops) {
        if (op.kind == NoisyOp::Kind::Depolarize && !(op.eps >= 0.0 && op.eps <= 1.0)) {
            throw ParameterError("depolarizing probability must lie in [0, 1]");
        }
    }
    const StateVector target = ideal_state(program, limits);
    const double target_norm = target.norm_squared();

    auto overlap = [&](const std::vector<std::pair<std::size_t, int>> &insertions) {
        StateVector psi(program.num_qubits);
        std::size_t next = 0;
        for (std::size_t i = 0; i < program.ops.size(); ++i) {
            const NoisyOp &op = program.ops[i];
            if (op.kind != NoisyOp::Kind::Depolarize) {
                psi.apply(op.unitary, op_qubits(op));
                continue;
            }
            if (next < insertions.size() && insertions[next].first == i) {
                const int p = insertions[next++].second;
                if (op.arity == 1) {
                    psi.apply(pauli(p), op_qubits(op));
                } else {
                    const std::array<int, 1> a{op.qubits[0]};
                    const std::array<int, 1> b{op.qubits[1]};
                    psi.apply(pauli(p / 4), a);
                    psi.apply(pauli(p % 4), b);
                }
            }
        }
        return abs2(inner(target.amplitudes(), psi.amplitudes())) / (target_norm * psi.norm_squared());
    };

    Rng rng(seed);
    std::vector<std::pair<std::size_t, int>> insertions;
    double clean_value = -1.0;
    double sum = 0.0;
    std::vector<double> values;
    values.reserve(shots);
    for (int s = 0; s < shots; ++s) {
        insertions.clear();
        for (std::size_t i = 0; i < program.ops.size(); ++i) {
            const NoisyOp &op = program.ops[i];
            if (op.kind != NoisyOp::Kind::Depolarize) {
                continue;
            }
            const int paulis = op.arity == 1 ? 4 : 16;
            const double identity_weight = 1.0 - op.eps * (paulis - 1) / paulis;
            if (rng.uniform() >= identity_weight) {
                insertions.emplace_back(i, 1 + static_cast<int>(rng.below(paulis - 1)));
            }
        }
        double v;
        if (insertions.empty()) {
            if (clean_value < 0.0) {
                clean_value = overlap(insertions);
            }
            v = clean_value;
        } else {
            v = overlap(insertions);
        }
        values.push_back(v);
        sum += v;
    }
    const double mean = sum / shots;
    double var = 0.0;
    for (double v : values) {
        var += (v - mean) * (v - mean);
    }
    FidelityEstimate est;
    est.value = mean;
    est.standard_error = shots > 1 ? std::sqrt(var / (shots - 1) / shots) : 0.0;
    est.shots = shots;
    return est;
}

double fidelity_pure(const StateVector &psi, const DensityMatrix &rho) {
    if (psi.num_qubits() != rho.num_qubits()) {
        throw ParameterError("state and density matrix have different qubit counts");
    }
    const auto a = psi.amplitudes();
    const auto m = rho.elements();
    const std::size_t d = rho.dim();
    Complex acc = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        Complex row = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            row += m[r * d + c] * a[c];
        }
        acc += std::conj(a[r]) * row;
    }
    const double f = acc.real();
    if (f < -1e-9 || f > 1.0 + 1e-9) {
        throw ValidationError("pure-state fidelity " + std::to_string(f) + " is outside [0, 1]");
    }
    return std::clamp(f, 0.0, 1.0);
}

namespace {

using EigenMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMatrix to_eigen(const DensityMatrix &rho) {
    const auto e = rho.elements();
    const auto d = static_cast<Eigen::Index>(rho.dim());
    return Eigen::Map<const EigenMatrix>(e.data(), d, d);
}

void check_density_matrix(const EigenMatrix &m, const char *which) {
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) {
        throw ValidationError(std::string(which) + " is not Hermitian");
    }
    if (std::abs(m.trace() - Complex(1.0)) > 1e-9) {
        throw ValidationError(std::string(which) + " does not have unit trace");
    }
}

/// Square root of a Hermitian PSD matrix. Eigenvalues in [-1e-9, 0) are
/// clamped to zero; anything lower is rejected.
EigenMatrix psd_sqrt(const EigenMatrix &m, const char *which) {
    Eigen::SelfAdjointEigenSolver<EigenMatrix> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -1e-9) {
        throw ValidationError(std::string(which) + " has a negative eigenvalue " + std::to_string(ev.minCoeff()));
    }
    // Eigenvalues at rounding level would otherwise contribute ~1e-8 each
    // after the square root.
    ev = (ev.array() < 1e-12).select(0.0, ev).cwiseSqrt();
    return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity_uhlmann(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.num_qubits() != sigma.num_qubits()) {
        throw ParameterError("density matrices have different qubit counts");
    }
    if (rho.num_qubits() > 10) {
        throw CapacityError("Uhlmann fidelity is limited to 10 qubits");
    }
    const EigenMatrix a = to_eigen(rho);
    const EigenMatrix b = to_eigen(sigma);
    check_density_matrix(a, "rho");
    check_density_matrix(b, "sigma");
    // tr sqrt(sqrt(rho) sigma sqrt(rho)) is the trace norm of sqrt(rho) sqrt(sigma).
    const EigenMatrix product = psd_sqrt(a, "rho") * psd_sqrt(b, "sigma");
    Eigen::JacobiSVD<EigenMatrix> svd(product);
    const double t = svd.singularValues().sum();
    return std::clamp(t * t, 0.0, 1.0);
}

LatticeCircuit restrict_to_tile(const LatticeCircuit &circuit, const Rect &tile) {
    LatticeCircuit out(tile.x_extent, tile.y_extent, circuit.depth());
    for (int m = 0; m < circuit.depth(); ++m) {
        for (int q = 0; q < circuit.num_qubits(); ++q) {
            const Site s = circuit.site(q);
            const Gate &g = circuit.at(m, s);
            if (g.is_identity()) {
                continue;
            }
            const bool anchor_in = tile.contains(s);
            const bool partner_in = is_two_qubit(g.kind) ? tile.contains(step(s, *g.dir)) : anchor_in;
            if (anchor_in != partner_in) {
                throw ValidationError("two-qubit gate at (" + std::to_string(s.x) + ", " + std::to_string(s.y) +
                                      ") in moment " + std::to_string(m) + " crosses a tile boundary");
            }
            if (anchor_in) {
                out.set(m, Site{s.x - tile.x0, s.y - tile.y0}, g);
            }
        }
    }
    return out;
}

double exact_fidelity(const LatticeCircuit &circuit, const SimNoiseModel &model, const SimulatorLimits &limits) {
    check_density_capacity(circuit.num_qubits(), limits);
    const NoisyProgram program = compile_noisy_program(circuit, model);
    return fidelity_pure(ideal_state(program, limits), simulate_density(program, limits));
}

FidelityEstimate tiled_fidelity(const LatticeCircuit &circuit, const Tiling &tiling, const SimNoiseModel &model,
                                const SimulatorLimits &limits) {
    tiling.validate(circuit.rows(), circuit.cols());
    if (model.scope != CrosstalkScope::GatePairOnly) {
        throw ParameterError("tiled fidelity requires gate-pair-only crosstalk");
    }
    std::vector<LatticeCircuit> parts;
    for (const Rect &tile : tiling.tiles) {
        parts.push_back(restrict_to_tile(circuit, tile));
    }
    FidelityEstimate est;
    est.value = 1.0;
    for (const LatticeCircuit &part : parts) {
        est.value *= exact_fidelity(part, model, limits);
    }
    return est;
}

}  // namespace qfe
