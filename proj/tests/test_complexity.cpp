#include "doctest.h"

#include "probrobust/complexity.hpp"
#include "probrobust/errors.hpp"

#include <cmath>
#include <numbers>

using namespace probrobust;

namespace {

/// h_t(i) = +1 iff i >= t on points 0..4, t = 0..5.
HypothesisClass thresholds() {
    std::vector<Hypothesis> members;
    for (PointId t = 0; t <= 5; ++t) {
        std::vector<std::pair<PointId, int>> entries;
        for (PointId i = 0; i < 5; ++i) entries.emplace_back(i, i >= t ? 1 : -1);
        members.push_back(Hypothesis::table(std::move(entries), -1));
    }
    return HypothesisClass::explicit_list(std::move(members));
}

std::vector<Instance> point_ids(std::size_t n) {
    std::vector<Instance> out;
    for (PointId i = 0; i < n; ++i) out.emplace_back(i);
    return out;
}

LossMatrix random_signs(std::size_t n, std::size_t f, Rng& rng) {
    LossMatrix m{n, f, std::vector<double>(n * f)};
    for (double& v : m.values) v = rng() % 2 ? 1.0 : -1.0;
    return m;
}

}  // namespace

TEST_CASE("thresholds on a line have VC dimension one") {
    const auto r = vc_dimension(thresholds(), point_ids(5), 5);
    CHECK(r.dimension == 1);
    CHECK(r.witness.size() == 1);
    CHECK(shatter_check(thresholds(), {PointId{2}}));
    CHECK_FALSE(shatter_check(thresholds(), {PointId{1}, PointId{3}}));
}

TEST_CASE("all tables on k points shatter them") {
    std::vector<Hypothesis> members;
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
        std::vector<std::pair<PointId, int>> entries;
        for (PointId i = 0; i < 4; ++i) entries.emplace_back(i, (mask >> i) & 1 ? 1 : -1);
        members.push_back(Hypothesis::table(std::move(entries), 1));
    }
    const auto cls = HypothesisClass::explicit_list(std::move(members));
    CHECK(vc_dimension(cls, point_ids(6), 6).dimension == 4);
    CHECK(vc_dimension(cls, point_ids(6), 3).dimension == 3);
}

TEST_CASE("homogeneous halfspaces in the plane have VC dimension two") {
    std::vector<Vector> dirs;
    for (int k = 0; k < 720; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 720.0 + 1e-3;
        dirs.push_back({std::cos(a), std::sin(a)});
    }
    const auto cls = HypothesisClass::halfspace_grid(dirs);
    std::vector<Instance> pts;
    for (int k = 0; k < 6; ++k) {
        const double a = 0.9 * k + 0.2;
        pts.emplace_back(Vector{std::cos(a), std::sin(a)});
    }
    CHECK(vc_dimension(cls, pts, 6).dimension == 2);
}

TEST_CASE("VC dimension is monotone in the class and the domain") {
    Rng rng(81);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 7, f = 3 + rng() % 20;
        BehaviorMatrix b{n, f, std::vector<std::uint8_t>(n * f)};
        for (auto& v : b.values) v = static_cast<std::uint8_t>(rng() % 2);
        const auto full = vc_dimension(b, n).dimension;
        BehaviorMatrix fewer{n, f - 1, std::vector<std::uint8_t>(b.values.begin(), b.values.end() - n)};
        CHECK(vc_dimension(fewer, n).dimension <= full);
        BehaviorMatrix narrower{n - 1, f, {}};
        for (std::size_t j = 0; j < f; ++j) {
            for (std::size_t i = 0; i + 1 < n; ++i) narrower.values.push_back(b.at(j, i));
        }
        CHECK(vc_dimension(narrower, n).dimension <= full);
        const auto r = vc_dimension(b, n);
        CHECK(shattered(b, r.witness));
        CHECK((1u << r.dimension) <= f);
    }
}

TEST_CASE("loss behaviors require a binary loss") {
    const Adversary adv = FiniteAtoms::uniform_translations({{0.0}});
    const auto cls = HypothesisClass::halfspace_grid({{1.0}, {-1.0}});
    const Dataset ex{{Vector{1.0}, 1}, {Vector{-1.0}, 1}};
    CHECK_THROWS_AS((void)loss_behaviors(LossSpec::hinge(), cls, adv, ex), ValidationError);
    const auto b = loss_behaviors(LossSpec::worst_case(), cls, adv, ex);
    CHECK(b.at(0, 0) == 0);
    CHECK(b.at(0, 1) == 1);
    CHECK(b.at(1, 0) == 1);
    CHECK(b.at(1, 1) == 0);
    CHECK(loss_class_vc(LossSpec::worst_case(), cls, adv, ex, 2).dimension == 1);
}

TEST_CASE("exact Rademacher average of two sign patterns on eight points") {
    LossMatrix m{8, 2, {}};
    const int f1[8] = {1, 1, 1, 1, -1, -1, -1, -1};
    const int f2[8] = {1, -1, 1, -1, 1, -1, 1, -1};
    for (int i = 0; i < 8; ++i) {
        m.values.push_back(f1[i]);
        m.values.push_back(f2[i]);
    }
    const auto r = empirical_rademacher(m, std::nullopt);
    CHECK(r.exact);
    CHECK(r.patterns == 256);
    CHECK(r.value == 0.1875);
    const auto mc = empirical_rademacher(m, 20000, 5);
    CHECK_FALSE(mc.exact);
    CHECK(std::fabs(mc.value - 0.1875) < 4 * mc.std_error + 1e-12);
}

TEST_CASE("a single function has zero Rademacher average") {
    Rng rng(82);
    const auto m = random_signs(9, 1, rng);
    CHECK(std::fabs(empirical_rademacher(m, std::nullopt).value) < 1e-15);
}

TEST_CASE("Rademacher averages stay below the finite-class bound") {
    Rng rng(83);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 11, f = 1 + rng() % 30;
        const auto m = random_signs(n, f, rng);
        const auto r = empirical_rademacher(m, std::nullopt);
        CHECK(r.value <= massart_bound(f, n) + 1e-12);
        CHECK(r.value >= -1e-12);
    }
    CHECK(massart_bound(1, 10) == 0.0);
}

TEST_CASE("Rademacher exact mode is capped and sampling is reproducible") {
    Rng rng(84);
    const auto big = random_signs(13, 3, rng);
    CHECK_THROWS((void)empirical_rademacher(big, std::nullopt));
    const auto a = empirical_rademacher(big, 500, 3);
    const auto b = empirical_rademacher(big, 500, 3);
    CHECK(a.value == b.value);
}

TEST_CASE("minimum cover of five collinear points") {
    const MetricSpaceSample s{{{0.0}, {0.5}, {1.0}, {1.5}, {2.0}}, 2.0};
    const auto exact = covering_number_exact(s, 0.5);
    CHECK(exact.size == 2);
    CHECK(is_cover(s, 0.5, exact.centers));
    const std::vector<std::size_t> middle{1, 3};
    CHECK(is_cover(s, 0.5, middle));
    const std::vector<std::size_t> one{2};
    CHECK_FALSE(is_cover(s, 0.5, one));
    CHECK(covering_number_exact(s, 1.0).size == 1);
}

TEST_CASE("greedy covers are valid and never smaller than the minimum") {
    Rng rng(85);
    for (int trial = 0; trial < 25; ++trial) {
        MetricSpaceSample s{{}, trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? 2.0 : INFINITY)};
        const std::size_t n = 4 + rng() % 12;
        for (std::size_t i = 0; i < n; ++i) s.elements.push_back({uniform01(rng), uniform01(rng)});
        const double r = 0.1 + 0.3 * uniform01(rng);
        const auto greedy = covering_number_greedy(s, r);
        const auto exact = covering_number_exact(s, r);
        CHECK(is_cover(s, r, greedy.centers));
        CHECK(is_cover(s, r, exact.centers));
        CHECK(exact.size <= greedy.size);
        CHECK(greedy.size == greedy.centers.size());
    }
}

TEST_CASE("metric distances use the requested norm") {
    const MetricSpaceSample s{{{0.0, 0.0}, {3.0, 4.0}}, 2.0};
    CHECK(s.distance(0, 1) == 5.0);
    CHECK(MetricSpaceSample{s.elements, 1.0}.distance(0, 1) == 7.0);
    CHECK(MetricSpaceSample{s.elements, INFINITY}.distance(0, 1) == 4.0);
}

TEST_CASE("dual witness attains the dual norm") {
    Rng rng(86);
    for (const double p : {1.0, 1.5, 2.0, 4.0, double(INFINITY)}) {
        for (int trial = 0; trial < 50; ++trial) {
            Vector w(3);
            for (double& c : w) c = 2.0 * uniform01(rng) - 1.0;
            const Vector u = dual_witness(w, p);
            CHECK(lp_norm(u, p) == doctest::Approx(1.0));
            CHECK(dot(w, u) == doctest::Approx(lp_norm(w, dual_exponent(p))));
        }
    }
}

TEST_CASE("shifted centers make every halfspace r-nice") {
    Rng rng(87);
    for (const double p : {1.0, 2.0, 3.0, double(INFINITY)}) {
        std::vector<Vector> ws, xs, taus;
        for (int t = 0; t < 200; ++t) {
            Vector w(2), x(2);
            for (double& c : w) c = 2.0 * uniform01(rng) - 1.0;
            for (double& c : x) c = 2.0 * uniform01(rng) - 1.0;
            ws.push_back(w);
            xs.push_back(x);
            Rng sub = make_rng(rng());
            taus.push_back(sample_lp_ball(1, 2, p, 0.3, sub).point(0));
        }
        // One exactly degenerate triple.
        ws.push_back({1.0, 0.0});
        xs.push_back({0.25, 0.5});
        taus.push_back({-0.25, 0.0});
        const auto report = r_nice_check(ws, xs, taus, p, 0.3, 200, 4);
        CAPTURE(p);
        CHECK(report.triples == 201);
        CHECK(report.excluded == 1);
        CHECK(report.pass_fraction == 1.0);
        CHECK(report.failures.empty());
        CHECK(report.note.empty() == (p == 2.0));
    }
}

TEST_CASE("r-nice input validation") {
    CHECK_THROWS_AS((void)r_nice_check({{1.0}}, {{0.0}}, {{1.0}}, 2.0, 0.5, 10, 0), ValidationError);
    CHECK_THROWS_AS((void)r_nice_check({{1.0}}, {}, {}, 2.0, 0.5, 10, 0), ValidationError);
    CHECK_THROWS_AS((void)r_nice_check({{1.0}}, {{0.0}}, {{0.0}}, 2.0, 0.0, 10, 0), ValidationError);
}
