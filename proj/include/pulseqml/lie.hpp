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

// lie.hpp - dynamical Lie algebra machinery: closure of the algebra
// generated by i * (model Hamiltonians), split into center and commuting
// simple ideals, squared projections onto the blocks, and the exact and
// sampled output-variance diagnostics built from them.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pulseqml/detail/parallel.hpp"
#include "pulseqml/detail/rng.hpp"
#include "pulseqml/linop.hpp"
#include "pulseqml/model.hpp"
#include "pulseqml/sim.hpp"
#include "pulseqml/types.hpp"

namespace pulseqml::lie {

// HS-orthonormal basis of anti-Hermitian matrices, together with a note on
// what produced each element (generator index or commutator pair).
struct LieBasis {
    std::vector<CMatrix> elements;
    std::vector<std::string> provenance;

    int dim() const { return int(elements.size()); }
};

namespace detail_lie {

inline constexpr double kZeroFloor = 1e-12;  // candidates below this are rounding noise

// Two-pass projection against an orthonormal basis; returns residual norm.
inline double project_out(const std::vector<CMatrix>& basis, CMatrix& v) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= linop::hs_inner(b, v) * b;
    return linop::hs_norm(v);
}

}  // namespace detail_lie

// Generators of the dynamical Lie algebra of a model: its channel
// Hamiltonians (encoding and control alike).
inline std::vector<CMatrix> generators(const model::ModelSpec& spec) { return spec.channel_operators(); }

// Orthonormal basis of the smallest real Lie algebra containing
// { i H : H in generators }. New commutators are accepted when their
// residual against the current basis exceeds tol relative to their norm.
inline LieBasis closure(const std::vector<CMatrix>& generators_hermitian, double tol = 1e-10,
                        int max_dim = -1) {
    LieBasis basis;
    if (generators_hermitian.empty()) return basis;
    const Eigen::Index d = generators_hermitian.front().rows();
    if (max_dim < 0) max_dim = int(d * d);
    if (max_dim < int(generators_hermitian.size()))
        throw std::invalid_argument("closure: max_dim must be at least the generator count");

    auto try_add = [&](CMatrix cand, const std::string& origin) {
        double norm = linop::hs_norm(cand);
        if (norm < detail_lie::kZeroFloor) return false;
        double residual = detail_lie::project_out(basis.elements, cand);
        if (residual < tol * norm) return false;
        if (basis.dim() + 1 > max_dim)
            throw MaxDimExceeded("closure: dimension cap " + std::to_string(max_dim) +
                                 " exceeded; the system is likely fully controllable");
        basis.elements.push_back(cand / residual);
        basis.provenance.push_back(origin);
        return true;
    };

    for (std::size_t k = 0; k < generators_hermitian.size(); ++k) {
        const auto& h = generators_hermitian[k];
        if (h.rows() != d || h.cols() != d) throw std::invalid_argument("closure: generator dimension mismatch");
        if (!linop::is_hermitian(h, 1e-10)) throw std::invalid_argument("closure: generators must be Hermitian");
        try_add(kImag * h, "gen" + std::to_string(k));
    }

    // Process commutator pairs in discovery order; every new element opens
    // pairs against all elements before it.
    for (int j = 1; j < basis.dim(); ++j) {
        for (int i = 0; i < j; ++i) {
            try_add(linop::commutator(basis.elements[i], basis.elements[j]),
                    "[" + std::to_string(i) + "," + std::to_string(j) + "]");
        }
    }
    return basis;
}

// Spot check of the LieBasis closure invariant: every commutator of basis
// elements stays inside the span.
inline bool is_closed(const LieBasis& basis, double tol = 1e-8) {
    for (int j = 1; j < basis.dim(); ++j)
        for (int i = 0; i < j; ++i) {
            CMatrix c = linop::commutator(basis.elements[i], basis.elements[j]);
            detail_lie::project_out(basis.elements, c);
            if (linop::hs_norm(c) > tol) return false;
        }
    return true;
}

// ------------------------------ ideal decomposition --------------------------

struct LieDecomposition {
    LieBasis center;
    std::vector<LieBasis> ideals;

    int total_dim() const {
        int d = center.dim();
        for (const auto& g : ideals) d += g.dim();
        return d;
    }
};

namespace detail_lie {

// Adjoint matrices ad_i with (ad_i)_{kj} = <B_k, [B_i, B_j]>; real and
// antisymmetric for an HS-orthonormal anti-Hermitian basis.
inline std::vector<RMatrix> adjoint_matrices(const LieBasis& basis) {
    const int dim = basis.dim();
    std::vector<RMatrix> ads(dim, RMatrix::Zero(dim, dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            CMatrix c = linop::commutator(basis.elements[i], basis.elements[j]);
            for (int k = 0; k < dim; ++k) ads[i](k, j) = linop::hs_inner(basis.elements[k], c).real();
        }
    return ads;
}

inline double project_out_real(const std::vector<RVector>& basis, RVector& v) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= b.dot(v) * b;
    return v.norm();
}

// Grow the module generated by `seeds` under the linear maps `ads`.
inline std::vector<RVector> grow_module(const std::vector<RMatrix>& ads, std::vector<RVector> seeds,
                                        double tol) {
    std::vector<RVector> block;
    for (auto& s : seeds) {
        double r = project_out_real(block, s);
        if (r > tol) block.push_back(s / r);
    }
    for (std::size_t front = 0; front < block.size(); ++front) {
        for (const auto& ad : ads) {
            RVector cand = ad * block[front];
            double norm = cand.norm();
            if (norm < kZeroFloor) continue;
            double r = project_out_real(block, cand);
            if (r > tol * norm) block.push_back(cand / r);
        }
    }
    return block;
}

// Split the semisimple part (given by the restricted adjoints) into minimal
// invariant subspaces: eigenvectors of ad_Z for a random Z each lie inside a
// single minimal ideal, and the module they generate is that ideal.
inline std::vector<std::vector<RVector>> split_ideals(const std::vector<RMatrix>& ads_restricted,
                                                      int v, detail::Rng rng, double tol) {
    RVector z(v);
    for (int a = 0; a < v; ++a) z[a] = rng.normal();
    z.normalize();
    RMatrix ad_z = RMatrix::Zero(v, v);
    // The restricted adjoint of sum_a z_a B'_a; ads_restricted holds the
    // restrictions of the original basis directions expressed in the
    // complement coordinates, so the combination uses the same coords.
    for (int a = 0; a < v; ++a) ad_z += z[a] * ads_restricted[a];

    Eigen::EigenSolver<RMatrix> es(ad_z);
    std::vector<int> order(v);
    for (int i = 0; i < v; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()[a].imag()) > std::abs(es.eigenvalues()[b].imag());
    });
    const double max_eig = std::abs(es.eigenvalues()[order.front()].imag());

    std::vector<std::vector<RVector>> blocks;
    std::vector<RVector> covered;
    auto covered_dim = [&] { return int(covered.size()); };
    for (int rank = 0; rank < v && covered_dim() < v; ++rank) {
        int idx = order[rank];
        if (std::abs(es.eigenvalues()[idx].imag()) < 1e-7 * std::max(max_eig, 1e-30)) break;
        Eigen::VectorXcd w = es.eigenvectors().col(idx);
        std::vector<RVector> seeds;
        seeds.push_back(w.real());
        seeds.push_back(w.imag());
        bool fresh = false;
        for (auto& s : seeds) {
            RVector probe = s;
            if (project_out_real(covered, probe) > 1e-6 * std::max(s.norm(), 1e-30)) fresh = true;
        }
        if (!fresh) continue;
        auto block = grow_module(ads_restricted, seeds, tol);
        blocks.push_back(block);
        for (const auto& b : block) {
            RVector u = b;
            double r = project_out_real(covered, u);
            if (r > 1e-10) covered.push_back(u / r);
        }
    }
    // Anything left over (all eigenvalues consumed but span incomplete) is
    // picked up by growing from a residual direction.
    while (covered_dim() < v) {
        RVector probe(v);
        for (int a = 0; a < v; ++a) probe[a] = rng.normal();
        double r = project_out_real(covered, probe);
        if (r < 1e-8) continue;
        auto block = grow_module(ads_restricted, {probe / r}, tol);
        blocks.push_back(block);
        for (const auto& b : block) {
            RVector u = b;
            double rr = project_out_real(covered, u);
            if (rr > 1e-10) covered.push_back(u / rr);
        }
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return blocks;
}

}  // namespace detail_lie

// Center (null space of the stacked adjoint maps, equivalently of the
// adjoint Casimir) plus minimal commuting ideals of the semisimple part.
// Two independently seeded splits must agree on the block dimensions.
inline LieDecomposition decompose(const LieBasis& basis, double tol = 1e-8, std::uint64_t seed = 1) {
    LieDecomposition dec;
    const int dim = basis.dim();
    if (dim == 0) return dec;

    auto ads = detail_lie::adjoint_matrices(basis);
    RMatrix casimir = RMatrix::Zero(dim, dim);
    for (const auto& ad : ads) casimir += ad.transpose() * ad;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(casimir);
    const double lam_max = es.eigenvalues().maxCoeff();

    auto element_from = [&](const RVector& coords) {
        CMatrix m = CMatrix::Zero(basis.elements.front().rows(), basis.elements.front().cols());
        for (int i = 0; i < dim; ++i) m += coords[i] * basis.elements[i];
        return m;
    };

    if (lam_max < 1e-14) {  // abelian: everything is center
        for (int i = 0; i < dim; ++i) {
            dec.center.elements.push_back(basis.elements[i]);
            dec.center.provenance.push_back("center");
        }
        return dec;
    }

    const double zero_thr = 1e-9 * lam_max;
    std::vector<int> center_cols, semi_cols;
    for (int i = 0; i < dim; ++i)
        (es.eigenvalues()[i] <= zero_thr ? center_cols : semi_cols).push_back(i);

    for (int c : center_cols) {
        dec.center.elements.push_back(element_from(es.eigenvectors().col(c)));
        dec.center.provenance.push_back("center");
    }

    const int v = int(semi_cols.size());
    if (v == 0) return dec;
    RMatrix q(dim, v);
    for (int a = 0; a < v; ++a) q.col(a) = es.eigenvectors().col(semi_cols[a]);

    // Restrict the adjoint action of each basis direction to the invariant
    // complement of the center: first map complement coords to a basis
    // combination, then restrict that combination's adjoint.
    std::vector<RMatrix> ads_restricted(v);
    {
        std::vector<RMatrix> ad_of_original(dim);
        for (int i = 0; i < dim; ++i) ad_of_original[i] = q.transpose() * ads[i] * q;
        for (int a = 0; a < v; ++a) {
            ads_restricted[a] = RMatrix::Zero(v, v);
            for (int i = 0; i < dim; ++i) ads_restricted[a] += q(i, a) * ad_of_original[i];
        }
    }

    auto dims_of = [](const std::vector<std::vector<RVector>>& blocks) {
        std::vector<int> d;
        for (const auto& b : blocks) d.push_back(int(b.size()));
        return d;
    };
    auto blocks = detail_lie::split_ideals(ads_restricted, v, detail::Rng(seed), 1e-9);
    auto check = detail_lie::split_ideals(ads_restricted, v, detail::Rng(seed ^ 0x5bf03635ULL), 1e-9);
    if (dims_of(blocks) != dims_of(check))
        throw DecompositionUnstable("decompose: two seeded ideal splits disagree on block dimensions");

    int sum = 0;
    for (const auto& block : blocks) {
        LieBasis ideal;
        for (const auto& coords : block) {
            ideal.elements.push_back(element_from(q * coords));
            ideal.provenance.push_back("ideal" + std::to_string(dec.ideals.size()));
        }
        sum += ideal.dim();
        dec.ideals.push_back(std::move(ideal));
    }
    if (sum != v) throw DecompositionUnstable("decompose: ideal dimensions do not add up");

    // Cross-block commutators must vanish.
    for (std::size_t a = 0; a < dec.ideals.size(); ++a)
        for (std::size_t b = a + 1; b < dec.ideals.size(); ++b)
            for (const auto& x : dec.ideals[a].elements)
                for (const auto& y : dec.ideals[b].elements)
                    if (linop::hs_norm(linop::commutator(x, y)) > tol)
                        throw DecompositionUnstable("decompose: ideals fail to commute");
    return dec;
}

// ---------------------------------- projections ------------------------------

// Squared norm of the orthogonal projection of (i * H) onto the block; the
// factor i carries Hermitian inputs into the anti-Hermitian ambient space.
inline double project_norm2(const LieBasis& block, const CMatrix& hermitian) {
    double total = 0.0;
    for (const auto& b : block.elements) {
        if (b.rows() != hermitian.rows()) throw std::invalid_argument("project_norm2: dimension mismatch");
        total += std::norm(linop::hs_inner(b, kImag * hermitian));
    }
    return total;
}

// ----------------------------------- variance --------------------------------

struct VarianceReport {
    struct Row {
        int dim = 0;
        double p_rho = 0.0;
        double p_obs = 0.0;
    };
    std::vector<Row> ideals;
    int center_dim = 0;
    double total = 0.0;
    bool rho_in_algebra = false;
    bool obs_in_algebra = false;
    double rho_residual = 0.0;
    double obs_residual = 0.0;

    std::string to_text() const;
};

// Var[f] = sum_j P_{g_j}(rho) P_{g_j}(M) / dim(g_j). The membership
// hypothesis (rho or M inside the algebra) is reported, not enforced.
inline VarianceReport variance_exact(const model::ModelSpec& spec, const LieDecomposition& dec) {
    VarianceReport report;
    report.center_dim = dec.center.dim();
    const CMatrix rho = spec.initial_density();
    const CMatrix& obs = spec.observable.matrix;
    for (const auto& ideal : dec.ideals) {
        VarianceReport::Row row;
        row.dim = ideal.dim();
        row.p_rho = project_norm2(ideal, rho);
        row.p_obs = project_norm2(ideal, obs);
        report.total += row.p_rho * row.p_obs / double(row.dim);
        report.ideals.push_back(row);
    }

    auto membership_residual = [&](const CMatrix& h) {
        const Eigen::Index d = h.rows();
        CMatrix traceless = h - (h.trace() / double(d)) * CMatrix::Identity(d, d);
        double norm = linop::hs_norm(traceless);
        if (norm < 1e-14) return 0.0;
        CMatrix v = kImag * traceless;
        detail_lie::project_out(dec.center.elements, v);
        for (const auto& ideal : dec.ideals) detail_lie::project_out(ideal.elements, v);
        return linop::hs_norm(v) / norm;
    };
    report.rho_residual = membership_residual(rho);
    report.obs_residual = membership_residual(obs);
    report.rho_in_algebra = report.rho_residual < 1e-8;
    report.obs_in_algebra = report.obs_residual < 1e-8;
    return report;
}

inline std::string VarianceReport::to_text() const {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "center dim " << center_dim << "\n";
    for (std::size_t j = 0; j < ideals.size(); ++j)
        out << "ideal " << j << " dim " << ideals[j].dim << " P(rho) " << num(ideals[j].p_rho)
            << " P(M) " << num(ideals[j].p_obs) << "\n";
    out << "rho in algebra: " << (rho_in_algebra ? "yes" : "no") << " (residual " << num(rho_residual)
        << ")\n";
    out << "observable in algebra: " << (obs_in_algebra ? "yes" : "no") << " (residual "
        << num(obs_residual) << ")\n";
    out << "variance " << num(total) << "\n";
    return out.str();
}

// ------------------------------- sampled variance ----------------------------

struct SampleOptions {
    int draws = 1000;
    double amp_lo = -3.14159265358979323846;
    double amp_hi = 3.14159265358979323846;
    std::uint64_t seed = 1;
    std::optional<RVector> x;  // drawn once from the domain when absent
    int threads = 0;
};

struct SampledVariance {
    double variance = 0.0;
    double mean = 0.0;
    int draws = 0;
    RVector x_used;
};

// Unbiased sample variance of measure(spec, x) over random draws of the
// tunable sub-pulse amplitudes, at one fixed input x. Draw i uses its own
// RNG stream, so results do not depend on the thread count.
inline SampledVariance variance_sampled(const model::ModelSpec& spec, const SampleOptions& opts) {
    if (opts.draws < 2) throw std::invalid_argument("variance_sampled: need at least two draws");
    SampledVariance result;
    result.draws = opts.draws;
    detail::Rng base(opts.seed);
    if (opts.x) {
        result.x_used = *opts.x;
    } else {
        detail::Rng xrng = base.stream(0x9e37);
        result.x_used = RVector(spec.m);
        for (int i = 0; i < spec.m; ++i)
            result.x_used[i] = xrng.uniform(spec.domain[i].first, spec.domain[i].second);
    }
    const auto ops = spec.channel_operators();
    std::vector<double> values(opts.draws);
    detail::parallel_for(
        opts.draws,
        [&](int draw) {
            detail::Rng rng = base.stream(std::uint64_t(draw));
            RMatrix amps = spec.schedule.amplitudes;
            for (int c = 0; c < spec.channels(); ++c)
                for (int s = 0; s < spec.schedule.segments(); ++s)
                    if (spec.schedule.tunable(c, s)) amps(c, s) = rng.uniform(opts.amp_lo, opts.amp_hi);
            StateVector psi = sim::evolve_final(spec, ops, amps, result.x_used);
            values[draw] = sim::expectation(spec.observable.matrix, psi);
        },
        opts.threads);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= double(opts.draws);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    result.mean = mean;
    result.variance = ss / double(opts.draws - 1);
    return result;
}

struct StationaryVariance {
    double variance = 0.0;
    double T = 0.0;
    bool stationary = false;
    std::vector<std::pair<double, double>> trace;  // (T, variance) pairs
    RVector x_used;
};

// Extend the pulse duration until the sampled variance stops moving
// (relative change below rel_tol between T and 1.5 T), up to a cap.
inline StationaryVariance stationary_variance(const model::ModelSpec& spec, const SampleOptions& opts,
                                              double t_start = 20.0, double t_cap = 120.0,
                                              double rel_tol = 0.05) {
    StationaryVariance out;
    model::ModelSpec work = spec;
    auto eval = [&](double t) {
        int segments = std::max(1, int(std::lround(t / work.schedule.dt)));
        model::resize_schedule(work, segments, work.schedule.dt);
        auto sv = variance_sampled(work, opts);
        out.x_used = sv.x_used;
        out.trace.emplace_back(t, sv.variance);
        return sv.variance;
    };
    double t = t_start;
    double current = eval(t);
    while (true) {
        double next_t = 1.5 * t;
        double next = eval(next_t);
        if (std::abs(next - current) <= rel_tol * std::max(std::abs(next), std::abs(current))) {
            out.variance = next;
            out.T = next_t;
            out.stationary = true;
            return out;
        }
        t = next_t;
        current = next;
        if (t > t_cap) {
            out.variance = current;
            out.T = t;
            out.stationary = false;
            return out;
        }
    }
}

}  // namespace pulseqml::lie
