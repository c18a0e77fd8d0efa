// Copyright 2026 The pulseqml authors
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

// model.hpp - declarative description of pulse-based models: Hamiltonian
// terms, piecewise-constant pulse schedules, initial states, observables,
// and constructors for the builtin model catalogue (spin-J chains,
// non-interacting qubits, cross-coupled chains, circular couplings and the
// two-qubit demo models).

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pulseqml/linop.hpp"
#include "pulseqml/types.hpp"

namespace pulseqml::model {

// ---------------------------------- Pauli strings ---------------------------

inline const CMatrix& pauli_matrix(char letter) {
    static const CMatrix id = CMatrix::Identity(2, 2);
    static const CMatrix sx = [] {
        CMatrix m(2, 2);
        m << 0, 1, 1, 0;
        return m;
    }();
    static const CMatrix sy = [] {
        CMatrix m(2, 2);
        m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
        return m;
    }();
    static const CMatrix sz = [] {
        CMatrix m(2, 2);
        m << 1, 0, 0, -1;
        return m;
    }();
    switch (letter) {
        case 'I': return id;
        case 'X': return sx;
        case 'Y': return sy;
        case 'Z': return sz;
        default: throw std::invalid_argument(std::string("pauli_matrix: invalid letter '") + letter + "'");
    }
}

// One Pauli word with a real coefficient, e.g. {"ZZ", 0.5} on two qubits.
struct PauliTerm {
    std::string letters;
    double coeff = 1.0;
};

// Dense Hermitian operator, optionally labelled by the Pauli terms that
// built it (kept for serialization and pretty-printing; the matrix is the
// source of truth).
struct HermitianOperator {
    CMatrix matrix;
    std::vector<PauliTerm> pauli;

    Eigen::Index dim() const { return matrix.rows(); }
};

inline CMatrix pauli_string_matrix(int n, const std::string& letters) {
    if (int(letters.size()) != n)
        throw std::invalid_argument("pauli_string_matrix: letter count must equal qubit count");
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("pauli_string_matrix: unsupported qubit count");
    CMatrix m = pauli_matrix(letters[0]);
    for (int k = 1; k < n; ++k) m = linop::kron(m, pauli_matrix(letters[k]));
    return m;
}

inline HermitianOperator build_pauli(int n, const std::string& letters, double coeff = 1.0) {
    HermitianOperator op;
    op.matrix = coeff * pauli_string_matrix(n, letters);
    op.pauli = {PauliTerm{letters, coeff}};
    return op;
}

inline HermitianOperator pauli_sum(int n, const std::vector<PauliTerm>& terms) {
    const Eigen::Index d = Eigen::Index(1) << n;
    HermitianOperator op;
    op.matrix = CMatrix::Zero(d, d);
    for (const auto& t : terms) op.matrix += t.coeff * pauli_string_matrix(n, t.letters);
    op.pauli = terms;
    return op;
}

inline HermitianOperator dense_operator(CMatrix m) {
    HermitianOperator op;
    op.matrix = std::move(m);
    return op;
}

// --------------------------------- spin-J operators --------------------------

// The 2^n-dimensional irreducible representation of su(2). Basis states
// |s>, s = (d-1)/2 ... -(d-1)/2, are mapped to computational indices in
// descending s, so Jz = diag((d-1)/2, ..., -(d-1)/2).
struct SpinOperators {
    Eigen::Index dim = 0;
    CMatrix jx, jy, jz;
};

inline SpinOperators spin_operators(int n) {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("spin_operators: unsupported qubit count");
    const Eigen::Index d = Eigen::Index(1) << n;
    SpinOperators ops;
    ops.dim = d;
    ops.jz = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) ops.jz(i, i) = 0.5 * double(d - 1) - double(i);
    // J+ |s> = sqrt(((d-1)/2 - s)((d+1)/2 + s)) |s+1>; with s = (d-1)/2 - i
    // this is the superdiagonal entry sqrt(i (d-i)) at (i-1, i).
    CMatrix jplus = CMatrix::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) jplus(i - 1, i) = std::sqrt(double(i) * double(d - i));
    CMatrix jminus = jplus.adjoint();
    ops.jx = 0.5 * (jplus + jminus);
    ops.jy = (jplus - jminus) / (2.0 * kImag);
    return ops;
}

// --------------------------------- pulse schedules ---------------------------

// Piecewise-constant control signals on [0, T] with K equal segments.
// Entries with tunable(c, k) == false are frozen and never touched by the
// optimizer (used for constant encoding pulses and constrained variants).
struct PulseSchedule {
    double dt = 0.1;
    RMatrix amplitudes;                                          // channels x K
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> tunable;  // channels x K

    int channels() const { return int(amplitudes.rows()); }
    int segments() const { return int(amplitudes.cols()); }
    double duration() const { return dt * segments(); }

    static PulseSchedule zeros(int channels, int segments, double dt) {
        PulseSchedule s;
        s.dt = dt;
        s.amplitudes = RMatrix::Zero(channels, segments);
        s.tunable = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(channels, segments, true);
        return s;
    }
};

// ------------------------------------ model spec -----------------------------

enum class TermKind { Encoding, Control };

// A single Hamiltonian term theta_pulse(t) * op (control) or
// x_input * theta_pulse(t) * op (encoding). Indices are 0-based here;
// the file format uses 1-based indices.
struct HamiltonianTerm {
    TermKind kind = TermKind::Control;
    int input = -1;  // encoding only
    int pulse = -1;
    HermitianOperator op;
};

struct ChannelBounds {
    double lo = 0.0, hi = 0.0;
};

struct ModelSpec {
    std::string id = "custom";
    int n = 0;  // qubits
    int m = 0;  // input dimension
    std::vector<HamiltonianTerm> terms;
    StateVector initial_state;
    HermitianOperator observable;
    PulseSchedule schedule;
    double scale = 1.0;  // trainable output scaling theta_0
    std::vector<std::pair<double, double>> domain;          // per input, default [-1,1]
    std::vector<std::optional<ChannelBounds>> bounds;       // per channel, none by default

    Eigen::Index dim() const { return Eigen::Index(1) << n; }
    int channels() const { return schedule.channels(); }
    int controls() const { return channels() - m; }

    CMatrix channel_operator(int c) const {
        CMatrix h = CMatrix::Zero(dim(), dim());
        for (const auto& t : terms)
            if (t.pulse == c) h += t.op.matrix;
        return h;
    }

    std::vector<CMatrix> channel_operators() const {
        std::vector<CMatrix> ops;
        ops.reserve(channels());
        for (int c = 0; c < channels(); ++c) ops.push_back(channel_operator(c));
        return ops;
    }

    CMatrix initial_density() const { return initial_state * initial_state.adjoint(); }

    void validate() const;
};

inline void ModelSpec::validate() const {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("ModelSpec: unsupported qubit count");
    const Eigen::Index d = dim();
    if (m < 0 || channels() < m) throw std::invalid_argument("ModelSpec: channel count must be at least m");
    if (int(domain.size()) != m) throw std::invalid_argument("ModelSpec: domain must have one range per input");
    if (!bounds.empty() && int(bounds.size()) != channels())
        throw std::invalid_argument("ModelSpec: bounds must have one entry per channel");
    if (initial_state.size() != d) throw std::invalid_argument("ModelSpec: initial state dimension mismatch");
    if (std::abs(initial_state.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("ModelSpec: initial state must be normalized");
    if (observable.matrix.rows() != d || !linop::is_hermitian(observable.matrix, 1e-12))
        throw std::invalid_argument("ModelSpec: observable must be Hermitian of matching dimension");
    if (!schedule.amplitudes.allFinite()) throw std::invalid_argument("ModelSpec: non-finite pulse amplitudes");
    for (const auto& t : terms) {
        if (t.op.matrix.rows() != d || t.op.matrix.cols() != d)
            throw std::invalid_argument("ModelSpec: term dimension mismatch");
        if (!linop::is_hermitian(t.op.matrix, 1e-12))
            throw std::invalid_argument("ModelSpec: term operator must be Hermitian");
        if (t.kind == TermKind::Encoding) {
            // Eq-3 style pairing: input k rides on pulse channel k.
            if (t.input < 0 || t.input >= m || t.pulse != t.input)
                throw std::invalid_argument("ModelSpec: encoding term must pair input k with pulse k");
        } else {
            if (t.pulse < m || t.pulse >= channels())
                throw std::invalid_argument("ModelSpec: control term pulse index out of range");
        }
    }
}

// H(x, segment) = sum_k x_k theta_k[seg] H_k + sum_k theta_k[seg] H_k.
inline CMatrix hamiltonian_at(const ModelSpec& spec, const RVector& x, int segment) {
    if (x.size() != spec.m) throw std::invalid_argument("hamiltonian_at: input dimension mismatch");
    if (segment < 0 || segment >= spec.schedule.segments())
        throw std::out_of_range("hamiltonian_at: segment index out of range");
    CMatrix h = CMatrix::Zero(spec.dim(), spec.dim());
    for (const auto& t : spec.terms) {
        double w = spec.schedule.amplitudes(t.pulse, segment);
        if (t.kind == TermKind::Encoding) w *= x[t.input];
        h += w * t.op.matrix;
    }
    return h;
}

// ------------------------------- schedule utilities --------------------------

// Freeze a whole channel at a constant amplitude (e.g. a constant encoding
// pulse, or the constrained theta_1 = theta_2 = 1 variant).
inline void freeze_channel(ModelSpec& spec, int channel, double value) {
    spec.schedule.amplitudes.row(channel).setConstant(value);
    spec.schedule.tunable.row(channel) = false;
}

inline void unfreeze_channel(ModelSpec& spec, int channel) {
    spec.schedule.tunable.row(channel) = true;
}

// Re-grid the schedule to K segments of width dt, preserving per-channel
// frozen values. Only channel-uniform masks are supported here.
inline void resize_schedule(ModelSpec& spec, int segments, double dt) {
    const int ch = spec.channels();
    PulseSchedule next = PulseSchedule::zeros(ch, segments, dt);
    for (int c = 0; c < ch; ++c) {
        bool frozen = !spec.schedule.tunable.row(c).any();
        bool free_all = spec.schedule.tunable.row(c).all();
        if (!frozen && !free_all)
            throw std::invalid_argument("resize_schedule: mixed per-segment masks cannot be re-gridded");
        if (frozen) {
            next.amplitudes.row(c).setConstant(spec.schedule.segments() > 0 ? spec.schedule.amplitudes(c, 0) : 0.0);
            next.tunable.row(c) = false;
        }
    }
    spec.schedule = std::move(next);
}

// ---------------------------------- builtin models ---------------------------

enum class InitialState { Paper, AllZero };

namespace detail_model {

inline StateVector basis_state(Eigen::Index dim, Eigen::Index idx) {
    StateVector v = StateVector::Zero(dim);
    v[idx] = 1.0;
    return v;
}

inline std::string one_site(int n, int site, char letter) {  // site is 0-based
    std::string s(n, 'I');
    s[site] = letter;
    return s;
}

}  // namespace detail_model

// Builtin models. Ids: "1" spin-J chain, su(2) symmetry; "2" non-interacting
// qubits, su(2)^n; "3" cross chain, so(n); "4" circularly coupled, fully
// controllable; "eq13" two-qubit ZZ encoding demo; "eq15" bivariate demo.
inline ModelSpec paper_model(const std::string& id, int n, InitialState initial = InitialState::Paper) {
    using detail_model::basis_state;
    using detail_model::one_site;

    ModelSpec spec;
    spec.id = id;
    auto add_encoding = [&spec](int input, HermitianOperator op) {
        spec.terms.push_back({TermKind::Encoding, input, input, std::move(op)});
    };
    auto add_control = [&spec](int pulse, HermitianOperator op) {
        spec.terms.push_back({TermKind::Control, -1, pulse, std::move(op)});
    };
    auto finish = [&spec](int channels, int segments, double dt) {
        spec.schedule = PulseSchedule::zeros(channels, segments, dt);
        for (int c = 0; c < spec.m; ++c) freeze_channel(spec, c, 1.0);
        spec.domain.assign(spec.m, {-1.0, 1.0});
        spec.validate();
    };

    if (id == "eq13") {
        if (n != 2) throw std::invalid_argument("paper_model: eq13 is a two-qubit model");
        spec.n = 2;
        spec.m = 1;
        add_encoding(0, build_pauli(2, "ZZ"));
        add_control(1, build_pauli(2, "XI"));
        add_control(2, build_pauli(2, "IX"));
        spec.observable = build_pauli(2, "ZZ");
        if (initial == InitialState::Paper) {
            StateVector v = StateVector::Zero(4);
            v[0] = 2.0 / std::sqrt(5.0);  // (2/sqrt5 |0> + 1/sqrt5 |1>) x |0>
            v[2] = 1.0 / std::sqrt(5.0);
            spec.initial_state = v;
        } else {
            spec.initial_state = basis_state(4, 0);
        }
        finish(3, 200, 0.1);
        return spec;
    }

    if (id == "eq15") {
        if (n != 2) throw std::invalid_argument("paper_model: eq15 is a two-qubit model");
        spec.n = 2;
        spec.m = 2;
        add_encoding(0, build_pauli(2, "YY"));
        add_encoding(1, build_pauli(2, "ZZ"));
        add_control(2, build_pauli(2, "XI"));
        add_control(3, build_pauli(2, "IX"));
        spec.observable = pauli_sum(2, {{"ZI", 1.0}, {"IZ", 1.0}});
        if (initial == InitialState::Paper) {
            StateVector v = StateVector::Zero(4);
            v[0] = 1.0 / std::sqrt(2.0);  // |0> x (|0> + |1>)/sqrt2
            v[1] = 1.0 / std::sqrt(2.0);
            spec.initial_state = v;
        } else {
            spec.initial_state = basis_state(4, 0);
        }
        spec.schedule = PulseSchedule::zeros(4, 40, 0.1);
        // Encoding pulses are trainable in this model; the constrained
        // theta_1 = theta_2 = 1 variant is obtained with freeze_channel.
        spec.schedule.amplitudes.row(0).setConstant(1.0);
        spec.schedule.amplitudes.row(1).setConstant(1.0);
        spec.domain.assign(spec.m, {-1.0, 1.0});
        spec.validate();
        return spec;
    }

    if (n < 2 || n > kMaxQubits) throw std::invalid_argument("paper_model: qubit count out of range");
    spec.n = n;
    spec.m = 1;
    const Eigen::Index d = Eigen::Index(1) << n;

    if (id == "1") {
        SpinOperators j = spin_operators(n);
        add_encoding(0, dense_operator(j.jz));
        add_control(1, dense_operator(j.jx));
        add_control(2, dense_operator(j.jy));
        spec.observable = dense_operator((2.0 / double(d - 1)) * j.jz);
        spec.initial_state = basis_state(d, 0);
        finish(3, 200, 0.1);
        return spec;
    }

    if (id == "2") {
        for (int k = 0; k < n; ++k) add_encoding(0, build_pauli(n, one_site(n, k, 'Z')));
        for (int k = 0; k < n; ++k) {
            add_control(1 + 2 * k, build_pauli(n, one_site(n, k, 'X')));
            add_control(2 + 2 * k, build_pauli(n, one_site(n, k, 'Y')));
        }
        std::vector<PauliTerm> obs;
        for (int k = 0; k < n; ++k) obs.push_back({one_site(n, k, 'Z'), 1.0 / double(n)});
        spec.observable = pauli_sum(n, obs);
        spec.initial_state = basis_state(d, 0);
        finish(1 + 2 * n, 200, 0.1);
        return spec;
    }

    if (id == "3") {
        if (n < 3) throw std::invalid_argument("paper_model: model 3 requires n >= 3");
        auto xy = [n](int site) {  // sx at site, sy at site+1 (0-based)
            std::string s(n, 'I');
            s[site] = 'X';
            s[site + 1] = 'Y';
            return s;
        };
        add_encoding(0, build_pauli(n, xy(0)));
        for (int k = 0; k < n - 1; ++k) add_control(1 + k, build_pauli(n, xy(k)));
        spec.observable = build_pauli(n, xy(n - 2));
        StateVector v = StateVector::Zero(d);
        v[0] = 0.5;  // |0...0>(|0>+|1>)(|0>+i|1>)/2
        v[1] = 0.5 * kImag;
        v[2] = 0.5;
        v[3] = 0.5 * kImag;
        spec.initial_state = v;
        finish(n, 200, 0.1);
        return spec;
    }

    if (id == "4") {
        for (int k = 0; k < n; ++k) add_encoding(0, build_pauli(n, one_site(n, k, 'Z')));
        for (int k = 0; k < n; ++k) {
            add_control(1 + 2 * k, build_pauli(n, one_site(n, k, 'X')));
            add_control(2 + 2 * k, build_pauli(n, one_site(n, k, 'Y')));
        }
        for (int k = 0; k < n; ++k) {
            std::string s(n, 'I');
            s[k] = 'Z';
            s[(k + 1) % n] = 'Z';
            add_control(1 + 2 * n + k, build_pauli(n, s));
        }
        spec.observable = build_pauli(n, one_site(n, 0, 'Z'));
        spec.initial_state = basis_state(d, 0);
        finish(1 + 3 * n, 200, 0.1);
        return spec;
    }

    throw std::invalid_argument("paper_model: unknown model id '" + id + "'");
}

}  // namespace pulseqml::model
