// Copyright 2026 The qgcnn authors
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

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "qgcnn/errors.hpp"

namespace qgcnn {

/// Largest simulable register. 2^12 complex doubles = 64 KiB per state.
inline constexpr int kMaxQubits = 12;

/// Euler angles of Rot(alpha, beta, gamma) = Rz(gamma) * Ry(beta) * Rz(alpha).
/// alpha acts on the state first.
template <typename Scalar>
struct RotationTripleT {
    Scalar alpha{};
    Scalar beta{};
    Scalar gamma{};
};

using RotationTriple = RotationTripleT<double>;

/// Dense pure state of an n-qubit register, n in [1, 12].
///
/// Basis convention: qubit 0 is the MOST significant bit of the basis index,
/// so |q0 q1 ... q(n-1)> lives at index q0*2^(n-1) + q1*2^(n-2) + ... and the
/// flattened classical vector fed to amplitude encoding maps to basis labels
/// bit-exactly in natural reading order.
template <typename Scalar = double>
class StateVecT {
  public:
    using Complex = std::complex<Scalar>;
    using Amplitudes = Eigen::Vector<Complex, Eigen::Dynamic>;
    using RealVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

    /// Constructs |00...0>.
    explicit StateVecT(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw ConfigError("num_qubits must be in [1, " + std::to_string(kMaxQubits) +
                              "], got " + std::to_string(num_qubits));
        }
        amps_ = Amplitudes::Zero(Eigen::Index{1} << num_qubits);
        amps_[0] = Complex{Scalar{1}, Scalar{0}};
    }

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dim() const { return amps_.size(); }

    Amplitudes& amplitudes() { return amps_; }
    const Amplitudes& amplitudes() const { return amps_; }

    /// Bit position (counted from the LSB) of `qubit` inside a basis index.
    int bit_pos(int qubit) const { return num_qubits_ - 1 - qubit; }

    Scalar squared_norm() const {
        Scalar s{};
        for (Eigen::Index i = 0; i < amps_.size(); ++i) s += std::norm(amps_[i]);
        return s;
    }

  private:
    int num_qubits_;
    Amplitudes amps_;
};

using StateVector = StateVecT<double>;

namespace detail {

template <typename Scalar>
void check_qubit(const StateVecT<Scalar>& state, int qubit) {
    if (qubit < 0 || qubit >= state.num_qubits()) {
        throw UsageError("qubit index " + std::to_string(qubit) + " out of range for " +
                         std::to_string(state.num_qubits()) + " qubits");
    }
}

} // namespace detail

/// Fresh |00...0> register.
template <typename Scalar>
StateVecT<Scalar> init_zero(int num_qubits) {
    return StateVecT<Scalar>(num_qubits);
}

inline StateVector init_zero(int num_qubits) { return StateVector(num_qubits); }

/// Applies an arbitrary single-qubit matrix {u00, u01, u10, u11} to `qubit`.
/// Amplitude pairs (i, i + stride) with stride = 2^bit_pos transform as a
/// 2x2 complex product; every other index is untouched.
template <typename Scalar>
void apply_one_qubit(StateVecT<Scalar>& state, int qubit,
                     const std::array<std::complex<Scalar>, 4>& u) {
    detail::check_qubit(state, qubit);
    const Eigen::Index stride = Eigen::Index{1} << state.bit_pos(qubit);
    const Eigen::Index dim = state.dim();
    auto* a = state.amplitudes().data();
    for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
        for (Eigen::Index i = block; i < block + stride; ++i) {
            const auto a0 = a[i];
            const auto a1 = a[i + stride];
            a[i] = u[0] * a0 + u[1] * a1;
            a[i + stride] = u[2] * a0 + u[3] * a1;
        }
    }
}

/// Ry(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]].
/// Real rotation, so the pair update needs no complex multiplies.
template <typename Scalar>
void apply_ry(StateVecT<Scalar>& state, int qubit, Scalar theta) {
    detail::check_qubit(state, qubit);
    const Scalar c = std::cos(theta / Scalar{2});
    const Scalar s = std::sin(theta / Scalar{2});
    const Eigen::Index stride = Eigen::Index{1} << state.bit_pos(qubit);
    const Eigen::Index dim = state.dim();
    auto* a = state.amplitudes().data();
    for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
        for (Eigen::Index i = block; i < block + stride; ++i) {
            const auto a0 = a[i];
            const auto a1 = a[i + stride];
            a[i] = c * a0 - s * a1;
            a[i + stride] = s * a0 + c * a1;
        }
    }
}

/// Rz(theta) = diag(exp(-i theta/2), exp(+i theta/2)).
template <typename Scalar>
void apply_rz(StateVecT<Scalar>& state, int qubit, Scalar theta) {
    detail::check_qubit(state, qubit);
    using Complex = typename StateVecT<Scalar>::Complex;
    const Complex p0{std::cos(theta / Scalar{2}), -std::sin(theta / Scalar{2})};
    const Complex p1 = std::conj(p0);
    const Eigen::Index stride = Eigen::Index{1} << state.bit_pos(qubit);
    const Eigen::Index dim = state.dim();
    auto* a = state.amplitudes().data();
    for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
        for (Eigen::Index i = block; i < block + stride; ++i) {
            a[i] *= p0;
            a[i + stride] *= p1;
        }
    }
}

/// Rot(alpha, beta, gamma) = Rz(gamma) * Ry(beta) * Rz(alpha), fused into a
/// single 2x2 application. Closed form of the product:
///   [  cos(b/2) e^{-i(a+g)/2}   -sin(b/2) e^{+i(a-g)/2} ]
///   [  sin(b/2) e^{-i(a-g)/2}    cos(b/2) e^{+i(a+g)/2} ]
template <typename Scalar>
std::array<std::complex<Scalar>, 4> rot_matrix(const RotationTripleT<Scalar>& r) {
    using Complex = std::complex<Scalar>;
    const Scalar cb = std::cos(r.beta / Scalar{2});
    const Scalar sb = std::sin(r.beta / Scalar{2});
    const Scalar plus = (r.alpha + r.gamma) / Scalar{2};
    const Scalar minus = (r.alpha - r.gamma) / Scalar{2};
    return {Complex{cb * std::cos(plus), -cb * std::sin(plus)},
            Complex{-sb * std::cos(minus), -sb * std::sin(minus)},
            Complex{sb * std::cos(minus), -sb * std::sin(minus)},
            Complex{cb * std::cos(plus), cb * std::sin(plus)}};
}

template <typename Scalar>
void apply_rot(StateVecT<Scalar>& state, int qubit, const RotationTripleT<Scalar>& r) {
    apply_one_qubit(state, qubit, rot_matrix(r));
}

/// CNOT: flips `target` on the basis states where `control` is 1. A pure
/// permutation of amplitudes, hence exact in floating point.
template <typename Scalar>
void apply_cnot(StateVecT<Scalar>& state, int control, int target) {
    detail::check_qubit(state, control);
    detail::check_qubit(state, target);
    if (control == target) throw UsageError("cnot control and target must differ");
    const Eigen::Index cmask = Eigen::Index{1} << state.bit_pos(control);
    const Eigen::Index tmask = Eigen::Index{1} << state.bit_pos(target);
    const Eigen::Index dim = state.dim();
    auto* a = state.amplitudes().data();
    for (Eigen::Index i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(a[i], a[i | tmask]);
        }
    }
}

/// <Z_qubit> = sum over basis states of |amp|^2 * (+1 if the qubit is 0,
/// -1 if it is 1). Lies in [-1, 1] for any normalized state.
template <typename Scalar>
Scalar expect_z(const StateVecT<Scalar>& state, int qubit) {
    detail::check_qubit(state, qubit);
    const Eigen::Index mask = Eigen::Index{1} << state.bit_pos(qubit);
    const Eigen::Index dim = state.dim();
    const auto* a = state.amplitudes().data();
    Scalar plus{}, minus{};
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Scalar w = std::norm(a[i]);
        if (i & mask) {
            minus += w;
        } else {
            plus += w;
        }
    }
    return plus - minus;
}

/// <Z> of every qubit in one pass over the amplitudes. Entry q accumulates
/// |amp|^2 with the sign of qubit q's bit, in ascending basis-index order,
/// bitwise identical to calling expect_z per qubit.
template <typename Scalar>
typename StateVecT<Scalar>::RealVector all_expect_z(const StateVecT<Scalar>& state) {
    const int n = state.num_qubits();
    const Eigen::Index dim = state.dim();
    const auto* a = state.amplitudes().data();
    typename StateVecT<Scalar>::RealVector plus =
        StateVecT<Scalar>::RealVector::Zero(n);
    typename StateVecT<Scalar>::RealVector minus =
        StateVecT<Scalar>::RealVector::Zero(n);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Scalar w = std::norm(a[i]);
        for (int q = 0; q < n; ++q) {
            if (i & (Eigen::Index{1} << (n - 1 - q))) {
                minus[q] += w;
            } else {
                plus[q] += w;
            }
        }
    }
    return plus - minus;
}

/// Overwrites the state with `values` scaled to unit L2 norm. The vector
/// length must equal the state dimension; a zero vector cannot be encoded.
template <typename Scalar>
void set_amplitudes(StateVecT<Scalar>& state,
                    const Eigen::Ref<const typename StateVecT<Scalar>::RealVector>& values) {
    if (values.size() != state.dim()) {
        throw UsageError("set_amplitudes length " + std::to_string(values.size()) +
                         " does not match state dimension " + std::to_string(state.dim()));
    }
    Scalar sq{};
    for (Eigen::Index i = 0; i < values.size(); ++i) sq += values[i] * values[i];
    if (!(sq > Scalar{0})) {
        throw EncodingError("cannot amplitude-encode a zero-norm vector");
    }
    const Scalar inv = Scalar{1} / std::sqrt(sq);
    auto& a = state.amplitudes();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        a[i] = typename StateVecT<Scalar>::Complex{values[i] * inv, Scalar{0}};
    }
}

} // namespace qgcnn
