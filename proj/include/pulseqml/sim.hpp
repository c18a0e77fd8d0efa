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

// sim.hpp - exact piecewise-constant time evolution and measurement, plus a
// truncated chronological-series engine: words of channel indices, exact
// piecewise-polynomial iterated integrals of the pulses, and the induced
// polynomial expansion of the measured output in the inputs x.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "pulseqml/linop.hpp"
#include "pulseqml/model.hpp"
#include "pulseqml/types.hpp"

namespace pulseqml::sim {

// ---------------------------------- evolution --------------------------------

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;

    const StateVector& final_state() const { return states.back(); }
};

// Weight of channel c in the Hamiltonian: x_c for encoding channels (the
// validated layout pairs input k with pulse channel k), 1 for controls.
inline RVector channel_weights(const model::ModelSpec& spec, const RVector& x) {
    if (x.size() != spec.m) throw std::invalid_argument("channel_weights: input dimension mismatch");
    RVector w = RVector::Ones(spec.channels());
    w.head(spec.m) = x;
    return w;
}

// Final state only, with caller-cached channel operators and an amplitude
// matrix that may differ from the one stored in the spec. This is the hot
// path shared by training and sampling loops.
inline StateVector evolve_final(const model::ModelSpec& spec, const std::vector<CMatrix>& channel_ops,
                                const RMatrix& amplitudes, const RVector& x) {
    const int K = int(amplitudes.cols());
    const RVector w = channel_weights(spec, x);
    StateVector psi = spec.initial_state;
    CMatrix h(spec.dim(), spec.dim());
    Eigen::SelfAdjointEigenSolver<CMatrix> es;
    for (int s = 0; s < K; ++s) {
        h.setZero();
        for (int c = 0; c < spec.channels(); ++c) {
            double a = w[c] * amplitudes(c, s);
            if (a != 0.0) h += a * channel_ops[c];
        }
        es.compute(h);
        StateVector phases(h.rows());
        for (Eigen::Index k = 0; k < h.rows(); ++k)
            phases[k] = std::exp(Complex(0.0, -spec.schedule.dt * es.eigenvalues()[k]));
        psi = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
    }
    return psi;
}

inline Trajectory evolve(const model::ModelSpec& spec, const RVector& x) {
    const auto ops = spec.channel_operators();
    const int K = spec.schedule.segments();
    const RVector w = channel_weights(spec, x);
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(spec.initial_state);
    CMatrix h(spec.dim(), spec.dim());
    for (int s = 0; s < K; ++s) {
        h.setZero();
        for (int c = 0; c < spec.channels(); ++c) h += w[c] * spec.schedule.amplitudes(c, s) * ops[c];
        traj.states.push_back(linop::propagator(h, spec.schedule.dt) * traj.states.back());
        traj.times.push_back(spec.schedule.dt * (s + 1));
    }
    return traj;
}

inline double expectation(const CMatrix& observable, const StateVector& psi) {
    Complex v = psi.dot(observable * psi);
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, observable.norm()))
        throw std::logic_error("expectation: imaginary residue too large for a Hermitian observable");
    return v.real();
}

// <psi(T;x)| M |psi(T;x)>
inline double measure(const model::ModelSpec& spec, const RVector& x) {
    StateVector psi = evolve_final(spec, spec.channel_operators(), spec.schedule.amplitudes, x);
    return expectation(spec.observable.matrix, psi);
}

// ------------------------------ iterated integrals ---------------------------

// A word of channel indices (j_1, ..., j_n), 0-based.
struct Word {
    std::vector<int> letters;
};

// Piecewise polynomial on the schedule grid; coefficients are stored per
// segment in the local coordinate tau = t - breaks[s], ascending degree.
struct PiecewisePoly {
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;

    double operator()(double t) const {
        if (coeffs.empty()) return 0.0;
        std::size_t s = 0;
        while (s + 1 < coeffs.size() && t >= breaks[s + 1]) ++s;
        double tau = t - breaks[s];
        const auto& c = coeffs[s];
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * tau + c[k];
        return v;
    }

    double end_value() const { return coeffs.empty() ? 0.0 : (*this)(breaks.back()); }
};

namespace detail_sim {

inline double eval_local(const std::vector<double>& c, double tau) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * tau + c[k];
    return v;
}

// One chronological integration step: poly(t) -> int_0^t theta_ch(s) poly(s) ds.
inline void integrate_channel(PiecewisePoly& p, const model::PulseSchedule& sched, int channel) {
    double running = 0.0;
    for (std::size_t s = 0; s < p.coeffs.size(); ++s) {
        const double a = sched.amplitudes(channel, int(s));
        const auto& q = p.coeffs[s];
        std::vector<double> r(q.size() + 1);
        r[0] = running;
        for (std::size_t k = 0; k < q.size(); ++k) r[k + 1] = a * q[k] / double(k + 1);
        running = eval_local(r, sched.dt);
        p.coeffs[s] = std::move(r);
    }
}

inline PiecewisePoly unit_poly(const model::PulseSchedule& sched) {
    PiecewisePoly p;
    const int K = sched.segments();
    p.breaks.resize(K + 1);
    for (int s = 0; s <= K; ++s) p.breaks[s] = sched.dt * s;
    p.coeffs.assign(K, {1.0});
    return p;
}

}  // namespace detail_sim

// Exact chronological integral of theta_{j1}(t1) ... theta_{jn}(tn) over the
// simplex t >= t1 >= ... >= tn >= 0, as a piecewise polynomial in t.
inline PiecewisePoly iterated_integral_poly(const model::PulseSchedule& sched, const Word& word) {
    for (int j : word.letters)
        if (j < 0 || j >= sched.channels()) throw std::invalid_argument("iterated_integral: invalid channel");
    PiecewisePoly p = detail_sim::unit_poly(sched);
    for (std::size_t li = word.letters.size(); li-- > 0;)
        detail_sim::integrate_channel(p, sched, word.letters[li]);
    return p;
}

inline double iterated_integral(const model::PulseSchedule& sched, const Word& word) {
    if (sched.segments() == 0) return word.letters.empty() ? 1.0 : 0.0;
    return iterated_integral_poly(sched, word).end_value();
}

// ------------------------------- series engine -------------------------------

// L_h X = -i [h, X]
inline CMatrix liouvillian(const CMatrix& h, const CMatrix& x) {
    return -kImag * (h * x - x * h);
}

namespace detail_sim {

void orientation_selftest();

// Depth-first walk over words, extending at the front so that both the
// operator composition L_{j1}(L_{j2}(...L_{jn}(rho)...)) and the integral
// recursion share their suffix with the parent node.
template <typename Visit>
void walk_words(const model::ModelSpec& spec, const std::vector<CMatrix>& ops, int max_len,
                std::size_t word_cap, Visit&& visit) {
    std::size_t words = 0;
    PiecewisePoly unit = unit_poly(spec.schedule);
    std::vector<int> used(std::max(spec.m, 1), 0);
    std::function<void(const CMatrix&, const PiecewisePoly&, int)> rec =
        [&](const CMatrix& mat, const PiecewisePoly& poly, int depth) {
            for (int ch = 0; ch < spec.channels(); ++ch) {
                if (++words > word_cap)
                    throw MaxDimExceeded("word enumeration exceeded the configured cap");
                CMatrix mat2 = liouvillian(ops[ch], mat);
                PiecewisePoly poly2 = poly;
                integrate_channel(poly2, spec.schedule, ch);
                if (ch < spec.m) ++used[ch];
                visit(mat2, poly2, used, depth + 1);
                if (depth + 1 < max_len) rec(mat2, poly2, depth + 1);
                if (ch < spec.m) --used[ch];
            }
        };
    if (max_len > 0 && spec.schedule.segments() > 0) rec(spec.initial_density(), unit, 0);
}

}  // namespace detail_sim

// Truncated chronological expansion of the evolved density matrix:
// rho(0) + sum over words up to the given length of
// c_word * x-monomial * L_{j1} ... L_{jn} rho(0).
inline CMatrix dyson_truncated(const model::ModelSpec& spec, const RVector& x, int order,
                               std::size_t word_cap = 1000000) {
    detail_sim::orientation_selftest();
    const RVector w = channel_weights(spec, x);
    const auto ops = spec.channel_operators();
    CMatrix result = spec.initial_density();
    detail_sim::walk_words(spec, ops, order, word_cap,
                           [&](const CMatrix& mat, const PiecewisePoly& poly, const std::vector<int>& used, int) {
                               double xmono = 1.0;
                               for (int i = 0; i < spec.m; ++i)
                                   for (int k = 0; k < used[i]; ++k) xmono *= x[i];
                               result += xmono * poly.end_value() * mat;
                           });
    return result;
}

// Partial sum of the coefficient of x_1^{k_1} ... x_m^{k_m} over words of
// length at most max_word_len whose encoding content matches `degrees`.
inline double monomial_coefficient(const model::ModelSpec& spec, const std::vector<int>& degrees,
                                   int max_word_len, std::size_t word_cap = 1000000) {
    detail_sim::orientation_selftest();
    if (int(degrees.size()) != spec.m)
        throw std::invalid_argument("monomial_coefficient: degree vector must have one entry per input");
    int total = 0;
    for (int k : degrees) {
        if (k < 0) throw std::invalid_argument("monomial_coefficient: negative degree");
        total += k;
    }
    if (total > max_word_len)
        throw std::invalid_argument("monomial_coefficient: total degree exceeds the word-length cutoff");
    const auto ops = spec.channel_operators();
    const CMatrix& obs = spec.observable.matrix;
    double coeff = 0.0;
    if (total == 0) coeff += (spec.initial_density() * obs).trace().real();
    detail_sim::walk_words(spec, ops, max_word_len, word_cap,
                           [&](const CMatrix& mat, const PiecewisePoly& poly, const std::vector<int>& used, int) {
                               for (int i = 0; i < spec.m; ++i)
                                   if (used[i] > degrees[i]) return;
                               for (int i = 0; i < spec.m; ++i)
                                   if (used[i] != degrees[i]) return;
                               coeff += poly.end_value() * (mat * obs).trace().real();
                           });
    return coeff;
}

namespace detail_sim {

// Asserts that the engine's operator-application order matches the exact
// evolution: with the composition applied innermost-first, the order-2
// truncation error must shrink by ~2^3 when the duration is halved. The
// reversed convention only reaches ~2^2 and fails this check.
inline void orientation_selftest() {
    thread_local bool running = false;
    if (running) return;
    static std::once_flag flag;
    std::call_once(flag, [] {
        running = true;
        auto make = [](double dt) {
            model::ModelSpec spec;
            spec.id = "selftest";
            spec.n = 1;
            spec.m = 0;
            spec.terms.push_back({model::TermKind::Control, -1, 0, model::build_pauli(1, "X")});
            spec.terms.push_back({model::TermKind::Control, -1, 1, model::build_pauli(1, "Z")});
            spec.observable = model::build_pauli(1, "Z");
            spec.initial_state = StateVector::Zero(2);
            spec.initial_state[0] = 1.0;
            spec.schedule = model::PulseSchedule::zeros(2, 2, dt);
            spec.schedule.amplitudes << 1.0, -0.6, 0.5, 1.2;
            spec.validate();
            return spec;
        };
        RVector x(0);
        auto error = [&](double dt) {
            auto spec = make(dt);
            auto traj = evolve(spec, x);
            CMatrix exact = traj.final_state() * traj.final_state().adjoint();
            return (dyson_truncated(spec, x, 2) - exact).norm();
        };
        double ratio = error(0.02) / error(0.01);
        if (!(ratio > 5.6))
            throw std::logic_error("sim: chronological-order self-test failed; composition orientation is wrong");
        running = false;
    });
}

}  // namespace detail_sim

}  // namespace pulseqml::sim
