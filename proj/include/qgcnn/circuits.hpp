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
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgcnn/statevector.hpp"

namespace qgcnn {

/// Angles of one variational block: `repeats` layers, each applying the ring
/// entangler followed by a general Rot on every qubit. Row (layer * num_qubits
/// + qubit) holds that rotation's (alpha, beta, gamma).
template <typename Scalar = double>
struct BlockParamsT {
    int num_qubits = 0;
    int repeats = 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 3> angles;

    static BlockParamsT Zero(int num_qubits, int repeats) {
        BlockParamsT p;
        p.num_qubits = num_qubits;
        p.repeats = repeats;
        p.angles = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>::Zero(
            static_cast<Eigen::Index>(num_qubits) * repeats, 3);
        return p;
    }

    Eigen::Index count() const {
        return static_cast<Eigen::Index>(num_qubits) * repeats * 3;
    }

    Eigen::Index row(int layer, int qubit) const {
        return static_cast<Eigen::Index>(layer) * num_qubits + qubit;
    }

    RotationTripleT<Scalar> rotation(int layer, int qubit) const {
        const Eigen::Index r = row(layer, qubit);
        return {angles(r, 0), angles(r, 1), angles(r, 2)};
    }

    void validate() const {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw ConfigError("block num_qubits must be in [1, " +
                              std::to_string(kMaxQubits) + "], got " +
                              std::to_string(num_qubits));
        }
        if (repeats < 1) {
            throw ConfigError("block repeats must be >= 1, got " + std::to_string(repeats));
        }
        if (angles.rows() != static_cast<Eigen::Index>(num_qubits) * repeats) {
            throw UsageError("block angle table has " + std::to_string(angles.rows()) +
                             " rows, expected " + std::to_string(num_qubits * repeats));
        }
    }
};

using BlockParams = BlockParamsT<double>;

/// Amplitude encoding: the 2^n-dimensional input becomes the state's
/// amplitudes after L2 normalization. The input length must be a power of
/// two no larger than 2^12; index k of the input maps to basis index k.
template <typename Scalar = double>
StateVecT<Scalar> amplitude_encode(
    const Eigen::Ref<const typename StateVecT<Scalar>::RealVector>& values) {
    const Eigen::Index len = values.size();
    int n = 0;
    while (n < kMaxQubits && (Eigen::Index{1} << (n + 1)) <= len) ++n;
    if (len < 2 || (Eigen::Index{1} << n) != len) {
        throw UsageError("amplitude_encode input length " + std::to_string(len) +
                         " is not a power of two in [2, " +
                         std::to_string(Eigen::Index{1} << kMaxQubits) + "]");
    }
    StateVecT<Scalar> state(n);
    set_amplitudes<Scalar>(state, values);
    return state;
}

/// Product-state encoding with explicit per-qubit angles: starting from
/// |0...0>, applies Ry(ry[q]) then Rz(rz[q]) to each qubit.
template <typename Scalar = double>
StateVecT<Scalar> encode_with_angles(
    const Eigen::Ref<const typename StateVecT<Scalar>::RealVector>& ry,
    const Eigen::Ref<const typename StateVecT<Scalar>::RealVector>& rz) {
    if (ry.size() != rz.size()) {
        throw UsageError("encode_with_angles: ry and rz lengths differ");
    }
    const int n = static_cast<int>(ry.size());
    StateVecT<Scalar> state(n); // validates n in [1, 12]
    for (int q = 0; q < n; ++q) {
        apply_ry<Scalar>(state, q, ry[q]);
        apply_rz<Scalar>(state, q, rz[q]);
    }
    return state;
}

/// Variational (angle) encoding of a real feature vector x: qubit q gets
/// Ry(arctan(x_q)) then Rz(arctan(x_q^2)). Bounded angles for any real input,
/// one qubit per feature.
template <typename Scalar = double>
StateVecT<Scalar> variational_encode(
    const Eigen::Ref<const typename StateVecT<Scalar>::RealVector>& x) {
    typename StateVecT<Scalar>::RealVector ry(x.size()), rz(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        ry[i] = std::atan(x[i]);
        rz[i] = std::atan(x[i] * x[i]);
    }
    return encode_with_angles<Scalar>(ry, rz);
}

namespace detail {

/// Destination map of one CNOT ring applied in order
/// CNOT(0->1), CNOT(1->2), ..., CNOT(n-2 -> n-1), CNOT(n-1 -> 0):
/// the amplitude at basis index b ends up at index perm[b]. CNOTs permute
/// basis states, so the whole ring collapses to one exact permutation.
inline const std::vector<Eigen::Index>& ring_permutation(int n) {
    static std::array<std::vector<Eigen::Index>, kMaxQubits + 1> cache;
    static std::array<std::once_flag, kMaxQubits + 1> built;
    std::call_once(built[n], [n] {
        const Eigen::Index dim = Eigen::Index{1} << n;
        auto& perm = cache[n];
        perm.resize(dim);
        for (Eigen::Index b = 0; b < dim; ++b) {
            Eigen::Index d = b;
            for (int q = 0; q < n; ++q) {
                const int control_pos = n - 1 - q;
                const int target_pos = n - 1 - ((q + 1) % n);
                if (d & (Eigen::Index{1} << control_pos)) {
                    d ^= Eigen::Index{1} << target_pos;
                }
            }
            perm[b] = d;
        }
    });
    return cache[n];
}

} // namespace detail

/// Ring of CNOTs: qubit q controls qubit q+1 for q = 0..n-2, applied in that
/// order, then qubit n-1 controls qubit 0. A single qubit has no distinct
/// neighbor, so the layer is the identity for n = 1.
template <typename Scalar>
void entangling_layer(StateVecT<Scalar>& state) {
    const int n = state.num_qubits();
    if (n < 2) return;
    const auto& perm = detail::ring_permutation(n);
    auto& a = state.amplitudes();
    typename StateVecT<Scalar>::Amplitudes moved(a.size());
    for (Eigen::Index b = 0; b < a.size(); ++b) moved[perm[b]] = a[b];
    a.swap(moved);
}

/// Runs one variational block on a copy of `initial`: `repeats` layers of
/// (ring entangler, then Rot(alpha, beta, gamma) on every qubit), and returns
/// <Z> of each qubit. The input state is not modified.
template <typename Scalar>
typename StateVecT<Scalar>::RealVector run_block(const StateVecT<Scalar>& initial,
                                                 const BlockParamsT<Scalar>& params) {
    params.validate();
    if (params.num_qubits != initial.num_qubits()) {
        throw UsageError("block expects " + std::to_string(params.num_qubits) +
                         " qubits, state has " + std::to_string(initial.num_qubits()));
    }
    StateVecT<Scalar> state = initial;
    for (int layer = 0; layer < params.repeats; ++layer) {
        entangling_layer(state);
        for (int q = 0; q < params.num_qubits; ++q) {
            apply_rot(state, q, params.rotation(layer, q));
        }
    }
    return all_expect_z(state);
}

} // namespace qgcnn
