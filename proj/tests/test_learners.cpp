#include "doctest.h"

#include "oracles.hpp"
#include "probrobust/errors.hpp"
#include "probrobust/learners.hpp"

#include <cmath>

using namespace probrobust;

namespace {

Dataset random_vectors(std::size_t n, std::size_t d, Rng& rng) {
    Dataset out;
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(d);
        for (auto& c : x) c = 2.0 * uniform01(rng) - 1.0;
        out.push_back({std::move(x), uniform01(rng) < 0.5 ? 1 : -1});
    }
    return out;
}

Adversary translations(std::size_t k, std::size_t d, double radius, Rng& rng) {
    std::vector<Vector> deltas;
    for (std::size_t i = 0; i < k; ++i) {
        Vector delta(d);
        for (auto& c : delta) c = (2.0 * uniform01(rng) - 1.0) * radius;
        deltas.push_back(std::move(delta));
    }
    return FiniteAtoms::uniform_translations(std::move(deltas));
}

}  // namespace

TEST_CASE("halfspace closed form matches a direct attack on the ball") {
    Rng rng(71);
    const double ps[] = {1.0, 2.0, INFINITY};
    std::size_t compared = 0, skipped = 0, disagreements = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double p = ps[trial % 3];
        const std::size_t d = 1 + static_cast<std::size_t>(rng() % 4);
        Vector w(d), x(d);
        for (auto& c : w) c = 2.0 * uniform01(rng) - 1.0;
        for (auto& c : x) c = 2.0 * uniform01(rng) - 1.0;
        if (lp_norm(w, INFINITY) == 0.0) continue;
        const int y = uniform01(rng) < 0.5 ? 1 : -1;
        const double gamma = 0.05 + 0.5 * uniform01(rng);
        const double slack = y * dot(w, x) - gamma * lp_norm(w, dual_exponent(p));
        if (std::fabs(slack) < 1e-9) {
            ++skipped;
            continue;
        }
        ++compared;
        const int closed = halfspace_worst_loss(w, {x, y}, p, gamma);
        const int attacked = oracle::halfspace_attack(w, x, y, p, gamma);
        if (closed != attacked) {
            ++disagreements;
            MESSAGE("p=" << p << " d=" << d << " slack=" << slack);
        }
    }
    CHECK(disagreements == 0);
    CHECK(compared > 990);
    MESSAGE("compared " << compared << ", skipped " << skipped);
}

TEST_CASE("ERM agrees with an exhaustive scan of empirical risks") {
    Rng rng(72);
    for (int trial = 0; trial < 20; ++trial) {
        const auto cls = HypothesisClass::halfspace_grid(2, 25, rng());
        const Adversary adv = translations(5, 2, 0.3, rng);
        const Dataset data = random_vectors(30, 2, rng);
        for (const auto& spec : {LossSpec::worst_case(), LossSpec::rho_threshold(Rational(1, 5)),
                                 LossSpec::ramp(Rational(1, 2), Rational(1, 10)), LossSpec::hinge()}) {
            const auto result = erm(spec, cls, adv, data, 9);
            double best = INFINITY;
            std::size_t best_index = 0;
            for (std::size_t j = 0; j < cls.size(); ++j) {
                const double r = empirical_risk(spec, cls.member(j), adv, data, 9);
                if (r < best) {
                    best = r;
                    best_index = j;
                }
            }
            CHECK(result.empirical_risk == best);
            CHECK(result.index == best_index);
            CHECK(result.hypothesis == cls.member(best_index));
            CHECK(result.evaluations == cls.size() * data.size());
        }
    }
}

TEST_CASE("column means equal per-hypothesis empirical risk bit for bit") {
    Rng rng(73);
    const auto cls = HypothesisClass::halfspace_grid(3, 17, 5);
    const Adversary ball = LpBall{2.0, 0.2, 64, 3};
    const Dataset data = random_vectors(41, 3, rng);
    const auto m = loss_matrix(LossSpec::linear_average(), cls, ball, data, 12);
    const auto means = column_means(m);
    for (std::size_t j = 0; j < cls.size(); ++j) {
        CHECK(means[j] == empirical_risk(LossSpec::linear_average(), cls.member(j), ball, data, 12));
    }
}

TEST_CASE("loss matrix is independent of the worker count") {
    Rng rng(74);
    const auto cls = HypothesisClass::halfspace_grid(2, 33, 8);
    const Adversary ball = LpBall{1.0, 0.3, 50, 4};
    const Dataset data = random_vectors(57, 2, rng);
    const auto a = loss_matrix(LossSpec::hinge(), cls, ball, data, 1, 1);
    const auto b = loss_matrix(LossSpec::hinge(), cls, ball, data, 1, 8);
    CHECK(a.values == b.values);
}

TEST_CASE("worst-case loss on a ball uses the closed form for halfspaces only") {
    Rng rng(75);
    const auto cls = HypothesisClass::halfspace_grid(2, 9, 1);
    const LpBall ball{2.0, 0.25, 10, 0};
    const Dataset data = random_vectors(20, 2, rng);
    const auto m = loss_matrix(LossSpec::worst_case(), cls, ball, data, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < cls.size(); ++j) {
            const Vector w = std::get<Halfspace>(cls.member(j).variant()).w;
            CHECK(m.at(i, j) == halfspace_worst_loss(w, data[i], 2.0, 0.25));
        }
    }
    const auto sines = HypothesisClass::sine_grid({0.0, 1.0});
    const Dataset line{{Vector{0.5}, 1}};
    CHECK_THROWS_AS((void)loss_matrix(LossSpec::worst_case(), sines, ball, line, 0), UnsupportedOperation);
}

TEST_CASE("robust ERM is ERM with the worst-case loss") {
    Rng rng(76);
    const auto cls = HypothesisClass::halfspace_grid(2, 40, 2);
    const Adversary adv = translations(6, 2, 0.25, rng);
    const Dataset data = random_vectors(25, 2, rng);
    const auto a = rerm(cls, adv, data, 3);
    const auto b = erm(LossSpec::worst_case(), cls, adv, data, 3);
    CHECK(a.index == b.index);
    CHECK(a.empirical_risk == b.empirical_risk);
    const auto c = prerm(Rational(1, 4), cls, adv, data, 3);
    const auto d = erm(LossSpec::rho_threshold(Rational(1, 4)), cls, adv, data, 3);
    CHECK(c.index == d.index);
}

TEST_CASE("ERM output is a member of the class") {
    Rng rng(77);
    const auto cls = HypothesisClass::halfspace_grid(2, 12, 6);
    const Adversary adv = translations(3, 2, 0.1, rng);
    const auto result = erm(LossSpec::hinge(), cls, adv, random_vectors(10, 2, rng), 0);
    CHECK(cls.index_of(result.hypothesis) == result.index);
}

TEST_CASE("tie policies") {
    const std::vector<double> risks{0.5, 0.25, 0.75, 0.25, 0.25};
    CHECK(select_minimizer(risks, TieBreak::lowest_index, 0) == 1);
    std::map<std::size_t, int> seen;
    for (std::uint64_t s = 0; s < 300; ++s) ++seen[select_minimizer(risks, TieBreak::random, s)];
    CHECK(seen.size() == 3);
    for (const auto& [index, count] : seen) {
        CHECK(risks[index] == 0.25);
        CHECK(count > 60);
    }
    CHECK(select_minimizer(risks, TieBreak::random, 7) == select_minimizer(risks, TieBreak::random, 7));
}

TEST_CASE("budget and empty data are reported") {
    Rng rng(78);
    const auto cls = HypothesisClass::halfspace_grid(2, 10, 1);
    const Adversary adv = translations(2, 2, 0.1, rng);
    const Dataset data = random_vectors(10, 2, rng);
    ErmOptions tight;
    tight.budget = 99;
    CHECK_THROWS_AS((void)erm(LossSpec::hinge(), cls, adv, data, 0, tight), BudgetExceeded);
    tight.budget = 100;
    CHECK_NOTHROW((void)erm(LossSpec::hinge(), cls, adv, data, 0, tight));
    CHECK_THROWS_AS((void)erm(LossSpec::hinge(), cls, adv, {}, 0), EmptyDataset);
}

TEST_CASE("halfspace grids are unit, distinct and reproducible") {
    const auto a = HypothesisClass::halfspace_grid(3, 50, 11);
    const auto b = HypothesisClass::halfspace_grid(3, 50, 11);
    CHECK(a.size() == 50);
    for (std::size_t j = 0; j < a.size(); ++j) {
        const Vector w = std::get<Halfspace>(a.member(j).variant()).w;
        CHECK(lp_norm(w, 2.0) == doctest::Approx(1.0));
        CHECK(a.member(j) == b.member(j));
        CHECK(a.index_of(a.member(j)) == j);
    }
    const auto dup = HypothesisClass::halfspace_grid({{1.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}});
    CHECK(dup.size() == 2);
}

TEST_CASE("construction class members follow mask order and weight") {
    const auto g = std::make_shared<const ConstructionGeometry>(6, Rational(1, 4));
    const auto all = HypothesisClass::construction(g);
    CHECK(all.size() == 64);
    const auto w2 = HypothesisClass::construction(g, 2);
    CHECK(w2.size() == 15);
    std::uint64_t previous = 0;
    for (std::size_t j = 0; j < w2.size(); ++j) {
        const auto bits = std::get<ConstructionHypothesis>(w2.member(j).variant()).bits;
        CHECK(std::popcount(bits) == 2);
        CHECK(bits > previous);
        previous = bits;
        CHECK(w2.index_of(w2.member(j)) == j);
    }
    CHECK(all.domain() == DomainKind::point);
}
