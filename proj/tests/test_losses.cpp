#include "doctest.h"

#include "probrobust/errors.hpp"
#include "probrobust/losses.hpp"

#include <cmath>
#include <numbers>

using namespace probrobust;

namespace {

/// Point 0 is moved to 100 + a by atom a; the table decides which images err.
struct PointFixture {
    Adversary adv;
    Hypothesis h;
};

PointFixture point_fixture(const std::vector<Rational>& weights, const std::vector<int>& image_labels) {
    std::vector<Atom> atoms;
    std::vector<std::pair<PointId, int>> entries;
    for (std::size_t a = 0; a < weights.size(); ++a) {
        atoms.push_back({ImageMap{{{0, 100 + a}}}, weights[a]});
        entries.emplace_back(100 + a, image_labels[a]);
    }
    return {FiniteAtoms(std::move(atoms)), Hypothesis::table(std::move(entries), 1)};
}

double loss(const LossSpec& spec, const PointFixture& f) {
    return pointwise_loss(spec, f.h, f.adv, {PointId{0}, 1}, 0);
}

}  // namespace

TEST_CASE("loss grammar parses every variant and round trips") {
    for (const char* text : {"worst", "rho:3/10", "ramp:3/10,1/10", "hinge", "squared", "exp", "avg", "scaled:3/10"}) {
        CHECK(LossSpec::parse(text).to_string() == text);
    }
    CHECK(LossSpec::parse("rho:0.3") == LossSpec::rho_threshold(Rational(3, 10)));
    CHECK(LossSpec::parse("ramp:0.5,0.1") == LossSpec::ramp(Rational(1, 2), Rational(1, 10)));
    CHECK_THROWS_AS(LossSpec::parse("ramp:0.1,0.5"), ValidationError);
    CHECK_THROWS_AS(LossSpec::parse("ramp:0.3"), ParseError);
    CHECK_THROWS_AS(LossSpec::parse("rho"), ParseError);
    CHECK_THROWS_AS(LossSpec::parse("hinge:1"), ParseError);
    CHECK_THROWS_AS(LossSpec::parse("rho:1"), ValidationError);
    CHECK_THROWS_AS(LossSpec::parse("scaled:0"), ValidationError);
    CHECK_THROWS_AS(LossSpec::parse("rho:0.333333"), ParseError);
    CHECK_THROWS_AS(LossSpec::parse("logistic"), ParseError);
}

TEST_CASE("rho-threshold uses a strict inequality, compared exactly") {
    const auto f = point_fixture({Rational(1, 2), Rational(1, 2)}, {1, -1});
    CHECK(loss(LossSpec::rho_threshold(Rational(1, 2)), f) == 0.0);
    CHECK(loss(LossSpec::rho_threshold(Rational(32767, 65536)), f) == 1.0);
    // 1/3 + 1/3 + 1/3 never sums to anything but exactly 1 here.
    const auto g = point_fixture({Rational(1, 3), Rational(1, 3), Rational(1, 3)}, {-1, -1, 1});
    CHECK(loss(LossSpec::rho_threshold(Rational(2, 3)), g) == 0.0);
    CHECK(loss(LossSpec::rho_threshold(Rational(1, 2)), g) == 1.0);
}

TEST_CASE("ramp interpolates linearly between the thresholds") {
    const auto f = point_fixture({Rational(3, 10), Rational(7, 10)}, {-1, 1});
    CHECK(loss(LossSpec::ramp(Rational(1, 2), Rational(1, 10)), f) == 0.5);
    CHECK(loss(LossSpec::ramp(Rational(1, 5), Rational(1, 10)), f) == 1.0);
    CHECK(loss(LossSpec::ramp(Rational(3, 5), Rational(2, 5)), f) == 0.0);
}

TEST_CASE("margin losses at the robust and non-robust extremes") {
    const auto robust = point_fixture({Rational(1)}, {1});
    const auto broken = point_fixture({Rational(1)}, {-1});
    CHECK(loss(LossSpec::hinge(), robust) == 0.0);
    CHECK(loss(LossSpec::hinge(), broken) == 2.0);
    CHECK(loss(LossSpec::squared(), broken) == 4.0);
    CHECK(loss(LossSpec::exponential(), robust) == std::exp(-1.0));
    CHECK(loss(LossSpec::linear_average(), broken) == 1.0);
    CHECK(loss(LossSpec::scaled_ramp(Rational(1, 4)), broken) == 1.0);
    CHECK(loss(LossSpec::worst_case(), robust) == 0.0);
    CHECK(loss(LossSpec::worst_case(), broken) == 1.0);
}

TEST_CASE("lipschitz constants of the margin losses") {
    CHECK(*lipschitz_constant(LossSpec::hinge()) == 1.0);
    CHECK(*lipschitz_constant(LossSpec::linear_average()) == 0.5);
    CHECK(*lipschitz_constant(LossSpec::squared()) == 4.0);
    CHECK(*lipschitz_constant(LossSpec::exponential()) == doctest::Approx(std::numbers::e));
    CHECK(*lipschitz_constant(LossSpec::ramp(Rational(3, 5), Rational(1, 10))) == doctest::Approx(1.0));
    CHECK(*lipschitz_constant(LossSpec::scaled_ramp(Rational(1, 4))) == 2.0);
    CHECK_FALSE(lipschitz_constant(LossSpec::rho_threshold(Rational(1, 3))).has_value());
    CHECK_FALSE(lipschitz_constant(LossSpec::worst_case()).has_value());
}

TEST_CASE("ramp slope agrees with finite differences through the chain rule") {
    const LossSpec ramp = LossSpec::ramp(Rational(3, 5), Rational(1, 10));
    const double h = 1e-6;
    const double t = 0.4;  // probability 0.3, inside the linear piece
    const double slope = (*loss_at_margin(ramp, t - h) - *loss_at_margin(ramp, t + h)) / (2 * h);
    CHECK(slope == doctest::Approx(*lipschitz_constant(ramp)).epsilon(1e-6));
}

TEST_CASE("every lipschitz loss respects its constant on a margin grid") {
    const std::vector<LossSpec> specs{LossSpec::hinge(),
                                      LossSpec::squared(),
                                      LossSpec::exponential(),
                                      LossSpec::linear_average(),
                                      LossSpec::ramp(Rational(1, 2), Rational(1, 10)),
                                      LossSpec::ramp(Rational(1, 100), Rational(0)),
                                      LossSpec::scaled_ramp(Rational(1, 3))};
    std::vector<double> grid(1000);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = -1.0 + 2.0 * static_cast<double>(i) / 999.0;
    for (const auto& spec : specs) {
        const double lip = *lipschitz_constant(spec);
        std::size_t violations = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = i + 1; j < grid.size(); j += 7) {
                const double gap = std::fabs(*loss_at_margin(spec, grid[i]) - *loss_at_margin(spec, grid[j]));
                if (gap > lip * (grid[j] - grid[i]) * (1 + 1e-12) + 1e-15) ++violations;
            }
        }
        CAPTURE(spec.to_string());
        CHECK(violations == 0);
    }
}

TEST_CASE("sandwich inequalities hold exactly on random point adversaries") {
    Rng rng(61);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t k = 1 + rng() % 6;
        std::vector<Rational> weights;
        std::int64_t left = 60;
        std::vector<int> labels;
        for (std::size_t a = 0; a < k; ++a) {
            const std::int64_t share = a + 1 == k ? left : 1 + static_cast<std::int64_t>(rng() % (left - (k - a - 1)));
            left -= share;
            weights.emplace_back(share, 60);
            labels.push_back(rng() % 2 ? 1 : -1);
        }
        if (left < 0) continue;
        const auto f = point_fixture(weights, labels);
        const auto stats = margin_stats(f.h, f.adv, {PointId{0}, 1}, 0);
        const auto rho_num = 1 + static_cast<std::int64_t>(rng() % 59);
        const Rational rho(rho_num, 60);
        const Rational rho_star(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(rho_num)), 60);
        const auto l = [&](const LossSpec& s) { return *exact_loss_from_margin(s, stats); };
        const Rational hi = l(LossSpec::rho_threshold(rho_star));
        const Rational mid = l(LossSpec::ramp(rho, rho_star));
        const Rational lo = l(LossSpec::rho_threshold(rho));
        CHECK(lo <= mid);
        CHECK(mid <= hi);
        CHECK(lo <= l(LossSpec::scaled_ramp(rho)));
        CHECK(l(LossSpec::scaled_ramp(rho)) <= l(LossSpec::worst_case()));
    }
}

TEST_CASE("threshold loss is antitone in rho") {
    const auto f = point_fixture({Rational(1, 5), Rational(1, 5), Rational(3, 5)}, {-1, 1, -1});
    double previous = 1.0;
    for (std::int64_t num = 0; num < 20; ++num) {
        const double v = loss(LossSpec::rho_threshold(Rational(num, 20)), f);
        CHECK(v <= previous);
        previous = v;
    }
}

TEST_CASE("linear-average loss is prob_mistake bit for bit") {
    Rng rng(62);
    for (int trial = 0; trial < 200; ++trial) {
        const Adversary ball = LpBall{2.0, 0.4, 101, rng()};
        const Hypothesis h = Hypothesis::halfspace({uniform01(rng) - 0.5, 1.0});
        const LabeledExample ex{Vector{uniform01(rng) - 0.5, uniform01(rng) - 0.5}, 1};
        const std::uint64_t seed = rng();
        CHECK(pointwise_loss(LossSpec::linear_average(), h, ball, ex, seed) == prob_mistake(h, ball, ex, seed));
    }
    const auto f = point_fixture({Rational(1, 3), Rational(2, 3)}, {-1, 1});
    CHECK(loss(LossSpec::linear_average(), f) == prob_mistake(f.h, f.adv, {PointId{0}, 1}, 0));
}

TEST_CASE("worst-case loss on a sampled ball is refused") {
    const Adversary ball = LpBall{2.0, 0.4, 10, 1};
    CHECK_THROWS_AS((void)pointwise_loss(LossSpec::worst_case(), Hypothesis::halfspace({1.0}), ball, {Vector{1.0}, 1}, 0),
                    UnsupportedOperation);
}

TEST_CASE("empirical risk is the ordered mean and needs data") {
    const auto f = point_fixture({Rational(1)}, {-1});
    const Hypothesis robust = Hypothesis::table({}, 1);
    CHECK(empirical_risk(LossSpec::rho_threshold(Rational(1, 4)), robust, f.adv, {{PointId{0}, 1}, {PointId{5}, 1}}, 0) ==
          0.0);
    // Labels chosen so that the losses are {0, 1, 1, 0}.
    const Dataset data{{PointId{0}, 1}, {PointId{0}, -1}, {PointId{7}, -1}, {PointId{7}, 1}};
    CHECK(empirical_risk(LossSpec::worst_case(), robust, f.adv, data, 0) == 0.5);
    CHECK_THROWS_AS((void)empirical_risk(LossSpec::hinge(), robust, f.adv, {}, 0), EmptyDataset);
}

TEST_CASE("finite-support population risk equals the weight-expanded empirical risk") {
    Rng rng(63);
    const auto f = point_fixture({Rational(1, 4), Rational(3, 4)}, {-1, 1});
    const Dataset pts{{PointId{0}, 1}, {PointId{0}, -1}, {PointId{100}, 1}, {PointId{101}, -1}};
    const std::vector<std::int64_t> counts{3, 1, 2, 2};
    std::vector<Rational> weights;
    Dataset expanded;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        weights.emplace_back(counts[i], 8);
        for (std::int64_t c = 0; c < counts[i]; ++c) expanded.push_back(pts[i]);
    }
    const auto dist = Distribution::finite(pts, weights);
    for (const auto& spec : {LossSpec::worst_case(), LossSpec::rho_threshold(Rational(1, 5)),
                             LossSpec::ramp(Rational(1, 2), Rational(0)), LossSpec::hinge()}) {
        CHECK(population_risk(spec, f.h, f.adv, dist, 0) == doctest::Approx(empirical_risk(spec, f.h, f.adv, expanded, 0)));
    }
}

TEST_CASE("population risk is zero on a point mass at a robust example") {
    const auto f = point_fixture({Rational(1)}, {1});
    const auto dist = Distribution::finite({{PointId{0}, 1}}, {Rational(1)});
    CHECK(population_risk(LossSpec::worst_case(), f.h, f.adv, dist, 0) == 0.0);
}

TEST_CASE("synthetic population risk uses the declared sample count") {
    const auto dist = Distribution::synthetic({"interval", {{"positive", 1.0}}, 4, 500});
    const Adversary none = FiniteAtoms::uniform_translations({{0.0}});
    CHECK(population_risk(LossSpec::worst_case(), Hypothesis::halfspace({1.0}), none, dist, 0) ==
          doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("threshold fragility flags estimates near rho") {
    CHECK(threshold_is_fragile(0.30, Rational(3, 10), 1000));
    CHECK(threshold_is_fragile(0.31, Rational(3, 10), 1000));
    CHECK_FALSE(threshold_is_fragile(0.45, Rational(3, 10), 1000));
}

TEST_CASE("ball discretization yields a uniform grid inside the ball") {
    const FiniteAtoms grid = discretize(LpBall{2.0, 0.25, 1, 0}, 2, 0.1);
    // Lattice points z with ||z|| <= 2.5: 21 of them.
    CHECK(grid.size() == 21);
    for (const auto& atom : grid.atoms()) CHECK(lp_norm(std::get<Translation>(atom.g).delta, 2.0) <= 0.25);
    CHECK(*grid.common_weight() == Rational(1, 21));
}
