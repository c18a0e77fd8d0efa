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

#include "pulseqml/lie.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace pulseqml;
using namespace testutil;

TEST_CASE("closure of the two-qubit demo generators has dimension six", "[lie]") {
    auto spec = model::paper_model("eq13", 2);
    auto basis = lie::closure(lie::generators(spec));
    REQUIRE(basis.dim() == 6);
    REQUIRE(lie::is_closed(basis));
}

TEST_CASE("closure of a single generator is one-dimensional", "[lie]") {
    auto basis = lie::closure({pauli_x()});
    REQUIRE(basis.dim() == 1);
    REQUIRE((basis.elements[0] - kImag * pauli_x() / std::sqrt(2.0)).norm() < 1e-12);
}

TEST_CASE("closure dimensions match the model catalogue", "[lie]") {
    for (int n = 2; n <= 4; ++n)
        REQUIRE(lie::closure(lie::generators(model::paper_model("1", n))).dim() == 3);
    for (int n = 2; n <= 4; ++n)
        REQUIRE(lie::closure(lie::generators(model::paper_model("2", n))).dim() == 3 * n);
    for (int n = 3; n <= 5; ++n)
        REQUIRE(lie::closure(lie::generators(model::paper_model("3", n))).dim() == n * (n - 1) / 2);
    REQUIRE(lie::closure(lie::generators(model::paper_model("4", 2))).dim() == 15);
}

TEST_CASE("closure respects the dimension cap", "[lie]") {
    auto gens = lie::generators(model::paper_model("4", 2));
    REQUIRE_THROWS_AS(lie::closure(gens, 1e-10, 10), MaxDimExceeded);
    REQUIRE_THROWS_AS(lie::closure(gens, 1e-10, 3), std::invalid_argument);
}

TEST_CASE("closure basis is orthonormal and anti-Hermitian", "[lie][property]") {
    auto basis = lie::closure(lie::generators(model::paper_model("2", 3)));
    for (int i = 0; i < basis.dim(); ++i) {
        REQUIRE(linop::is_anti_hermitian(basis.elements[i], 1e-10));
        for (int j = 0; j < basis.dim(); ++j) {
            Complex g = linop::hs_inner(basis.elements[i], basis.elements[j]);
            REQUIRE(std::abs(g - (i == j ? Complex(1, 0) : Complex(0, 0))) < 1e-9);
        }
    }
}

TEST_CASE("closure is idempotent and basis-independent", "[lie][property]") {
    auto spec = model::paper_model("eq13", 2);
    auto basis = lie::closure(lie::generators(spec));
    // Re-close on i * (the basis) mapped back to Hermitian generators.
    std::vector<CMatrix> hermitians;
    for (const auto& b : basis.elements) hermitians.push_back((b / kImag).eval());
    REQUIRE(lie::closure(hermitians).dim() == basis.dim());

    // Random orthogonal recombinations of the generators span the same set.
    detail::Rng rng(77);
    auto gens = lie::generators(spec);
    std::vector<CMatrix> mixed;
    mixed.push_back(gens[0] + 0.3 * gens[1]);
    mixed.push_back(gens[1] - 2.0 * gens[2]);
    mixed.push_back(gens[0] + gens[1] + gens[2]);
    REQUIRE(lie::closure(mixed).dim() == basis.dim());
}

TEST_CASE("decompose splits the demo algebra into two commuting su(2) blocks", "[lie]") {
    auto basis = lie::closure(lie::generators(model::paper_model("eq13", 2)));
    auto dec = lie::decompose(basis);
    REQUIRE(dec.center.dim() == 0);
    REQUIRE(dec.ideals.size() == 2);
    REQUIRE(dec.ideals[0].dim() == 3);
    REQUIRE(dec.ideals[1].dim() == 3);
    // Blocks commute and each block re-closes onto itself.
    for (const auto& x : dec.ideals[0].elements)
        for (const auto& y : dec.ideals[1].elements)
            REQUIRE(linop::hs_norm(linop::commutator(x, y)) < 1e-8);
    for (const auto& ideal : dec.ideals) {
        std::vector<CMatrix> hermitians;
        for (const auto& b : ideal.elements) hermitians.push_back((b / kImag).eval());
        REQUIRE(lie::closure(hermitians).dim() == 3);
    }
}

TEST_CASE("decompose finds n commuting blocks for the non-interacting model", "[lie]") {
    auto basis = lie::closure(lie::generators(model::paper_model("2", 2)));
    auto dec = lie::decompose(basis);
    REQUIRE(dec.center.dim() == 0);
    REQUIRE(dec.ideals.size() == 2);
    for (const auto& ideal : dec.ideals) REQUIRE(ideal.dim() == 3);
}

TEST_CASE("decompose of an abelian algebra is all center", "[lie]") {
    auto basis = lie::closure({pauli_z()});
    auto dec = lie::decompose(basis);
    REQUIRE(dec.center.dim() == 1);
    REQUIRE(dec.ideals.empty());
}

TEST_CASE("decompose reassembles the input span", "[lie][property]") {
    auto basis = lie::closure(lie::generators(model::paper_model("2", 3)));
    auto dec = lie::decompose(basis);
    std::vector<CMatrix> all = dec.center.elements;
    for (const auto& ideal : dec.ideals)
        all.insert(all.end(), ideal.elements.begin(), ideal.elements.end());
    REQUIRE(int(all.size()) == basis.dim());
    REQUIRE(gram_rank_oracle(all) == basis.dim());
    // Every reassembled element stays inside the original span.
    for (auto m : all) {
        lie::detail_lie::project_out(basis.elements, m);
        REQUIRE(linop::hs_norm(m) < 1e-9);
    }
}

TEST_CASE("project_norm2 of a member is its squared norm, identity projects to zero", "[lie]") {
    auto basis = lie::closure(lie::generators(model::paper_model("eq13", 2)));
    lie::LieBasis block = basis;
    CMatrix h = 1.7 * kron_oracle(pauli_z(), pauli_z());  // inside the algebra
    REQUIRE(lie::project_norm2(block, h) == Catch::Approx(linop::hs_norm(h) * linop::hs_norm(h)).margin(1e-10));
    REQUIRE(lie::project_norm2(block, CMatrix::Identity(4, 4)) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("model 3 projections reproduce the closed-form appendix values", "[lie]") {
    const int n = 4;
    auto spec = model::paper_model("3", n);
    auto basis = lie::closure(lie::generators(spec));
    REQUIRE(basis.dim() == n * (n - 1) / 2);
    lie::LieBasis whole = basis;
    REQUIRE(lie::project_norm2(whole, spec.observable.matrix) == Catch::Approx(std::pow(2.0, n)).margin(1e-9));
    REQUIRE(lie::project_norm2(whole, spec.initial_density()) ==
            Catch::Approx(std::pow(2.0, -n)).margin(1e-12));
}

TEST_CASE("exact variance reproduces the closed-form table", "[lie]") {
    auto run = [](const std::string& id, int n) {
        auto spec = model::paper_model(id, n);
        auto dec = lie::decompose(lie::closure(lie::generators(spec)));
        return lie::variance_exact(spec, dec);
    };
    REQUIRE(run("1", 4).total == Catch::Approx(1.0 / 3.0).margin(1e-10));
    REQUIRE(run("2", 5).total == Catch::Approx(1.0 / 15.0).margin(1e-10));
    REQUIRE(run("3", 4).total == Catch::Approx(1.0 / 6.0).margin(1e-10));
    REQUIRE(run("4", 2).total == Catch::Approx(1.0 / 5.0).margin(1e-10));

    auto report = run("2", 3);
    REQUIRE(report.obs_in_algebra);
    REQUIRE(report.ideals.size() == 3);
    REQUIRE(report.to_text().find("variance") != std::string::npos);
}

TEST_CASE("sampled variance of a degenerate distribution is zero", "[lie]") {
    auto spec = model::paper_model("eq13", 2);
    model::resize_schedule(spec, 5, 0.1);
    lie::SampleOptions opts;
    opts.draws = 8;
    opts.amp_lo = opts.amp_hi = 0.4;  // every draw identical
    auto sv = lie::variance_sampled(spec, opts);
    REQUIRE(sv.variance == Catch::Approx(0.0).margin(1e-24));
    REQUIRE_THROWS_AS(lie::variance_sampled(spec, lie::SampleOptions{.draws = 1}), std::invalid_argument);
}

TEST_CASE("sampled variance is reproducible and thread-count independent", "[lie]") {
    auto spec = model::paper_model("eq13", 2);
    model::resize_schedule(spec, 20, 0.1);
    lie::SampleOptions opts;
    opts.draws = 64;
    opts.seed = 9;
    auto a = lie::variance_sampled(spec, opts);
    opts.threads = 4;
    auto b = lie::variance_sampled(spec, opts);
    REQUIRE(a.variance == b.variance);
    REQUIRE(a.x_used == b.x_used);
}

TEST_CASE("sampled variance approaches the exact value for the smallest model", "[lie]") {
    // Model 1 at n = 2: Var = 1/3; modest draws keep this test quick, the
    // tight version lives in the acceptance suite.
    auto spec = model::paper_model("1", 2);
    lie::SampleOptions opts;
    opts.draws = 400;
    opts.seed = 4;
    auto sv = lie::variance_sampled(spec, opts);
    REQUIRE(sv.variance == Catch::Approx(1.0 / 3.0).epsilon(0.25));
}
