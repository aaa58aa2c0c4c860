#include "doctest.h"

#include "probrobust/complexity.hpp"
#include "probrobust/constructions.hpp"
#include "probrobust/errors.hpp"

#include <bit>
#include <cmath>
#include <set>

using namespace probrobust;

TEST_CASE("geometry block weights sum to one") {
    for (std::size_t k : {1u, 2u, 5u, 9u}) {
        for (const Rational rho : {Rational(0), Rational(1, 4), Rational(1, 2)}) {
            for (bool reserve : {false, true}) {
                const ConstructionGeometry g(k, rho, reserve);
                Rational total(0);
                for (const auto& b : g.blocks()) total = total + b.weight;
                CHECK(total == Rational(1));
                const std::size_t extra = (reserve ? 2 : 1) + (rho == Rational(0) ? 0 : 1);
                CHECK(g.atom_count() == extra + g.labeled_blocks());
            }
        }
    }
    CHECK_THROWS_AS(ConstructionGeometry(0, Rational(1, 4)), ValidationError);
    CHECK_THROWS_AS(ConstructionGeometry(21, Rational(1, 4)), ValidationError);
    CHECK_THROWS_AS(ConstructionGeometry(3, Rational(1)), ValidationError);
}

TEST_CASE("labeled blocks enumerate the bitstrings with the center bit set") {
    const ConstructionGeometry g(5, Rational(1, 4));
    for (std::size_t i = 0; i < 5; ++i) {
        std::set<std::uint64_t> seen;
        std::uint64_t previous = 0;
        for (std::size_t t = 0; t < g.labeled_blocks(); ++t) {
            const auto bits = g.labeled_bitstring(i, t);
            CHECK(((bits >> i) & 1) == 1);
            CHECK(g.labeled_index(i, bits) == t);
            if (t > 0) CHECK(g.bits_to_string(previous) < g.bits_to_string(bits));
            previous = bits;
            seen.insert(bits);
        }
        CHECK(seen.size() == 16);
    }
    CHECK(g.bits_to_string(0b00011) == "11000");
    CHECK(g.bits_from_string("11000") == 0b00011);
    CHECK_THROWS_AS((void)g.bits_from_string("1100"), ValidationError);
}

TEST_CASE("image ids decode back to their center and atom") {
    const ConstructionGeometry g(4, Rational(1, 3), true, 100);
    CHECK(g.center_id(0) == 100);
    CHECK_FALSE(g.decode_image(g.center_id(3)).has_value());
    CHECK_FALSE(g.decode_image(g.end_id()).has_value());
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t a = 0; a < g.atom_count(); ++a) {
            const auto decoded = g.decode_image(g.image_id(i, a));
            REQUIRE(decoded.has_value());
            CHECK(decoded->first == i);
            CHECK(decoded->second == a);
        }
    }
}

TEST_CASE("each center loses rho plus one labeled block exactly when its bit is set") {
    for (std::size_t m = 1; m <= 6; ++m) {
        const Rational rho(1, 4);
        const auto inst = build_construction(m, rho);
        const Rational block = (Rational(1) - rho) / Rational(std::int64_t{1} << m);
        for (std::size_t j = 0; j < inst.cls.size(); ++j) {
            const Hypothesis h = inst.cls.member(j);
            const auto bits = std::get<ConstructionHypothesis>(h.variant()).bits;
            for (std::size_t i = 0; i < m; ++i) {
                const auto stats = margin_stats(h, inst.adversary, inst.centers[i], 0);
                const bool set = ((bits >> i) & 1) != 0;
                CHECK(*stats.exact_mistake == (set ? rho + block : rho));
                CHECK(*stats.any_mistake);
            }
        }
    }
}

TEST_CASE("rho-loss behaviors on the centers are the bitstrings themselves") {
    for (std::size_t m = 1; m <= 5; ++m) {
        const auto inst = build_construction(m, Rational(1, 4));
        const auto b = loss_behaviors(LossSpec::rho_threshold(Rational(1, 4)), inst.cls, inst.adversary, inst.centers);
        for (std::size_t j = 0; j < inst.cls.size(); ++j) {
            const auto bits = std::get<ConstructionHypothesis>(inst.cls.member(j).variant()).bits;
            for (std::size_t i = 0; i < m; ++i) CHECK(b.at(j, i) == ((bits >> i) & 1));
        }
        CHECK(vc_dimension(b, m).dimension == m);
        // Worst-case loss is 1 everywhere, so that loss class shatters nothing.
        CHECK(loss_class_vc(LossSpec::worst_case(), inst.cls, inst.adversary, inst.centers, m).dimension == 0);
    }
}

TEST_CASE("the construction class itself shatters no pair of points") {
    for (std::size_t m : {2u, 3u, 4u}) {
        const auto inst = build_construction(m, Rational(1, 4));
        CHECK(vc_dimension(inst.cls, inst.domain, 3).dimension == 1);
    }
}

TEST_CASE("weight-restricted classes keep exactly the bitstrings of that weight") {
    const auto inst = build_construction(6, Rational(1, 4), 2);
    CHECK(inst.cls.size() == 15);
    const auto b = loss_behaviors(LossSpec::rho_threshold(Rational(1, 4)), inst.cls, inst.adversary, inst.centers);
    for (std::size_t j = 0; j < b.functions; ++j) {
        int ones = 0;
        for (std::size_t i = 0; i < 6; ++i) ones += b.at(j, i);
        CHECK(ones == 2);
    }
}

TEST_CASE("two-block class has VC dimension at most one") {
    const auto two = build_two_block(1, 2, Rational(1, 4));
    CHECK(two.first_family_size == 3);
    CHECK(two.cls.size() == 3 + 15);
    CHECK(vc_dimension(two.cls, two.domain, 3).dimension <= 1);
    CHECK(two.first->end_id() == two.second->first_id());
    // Within its own block each family still realizes its bitstrings as rho-losses.
    Dataset centers;
    for (std::size_t i = 0; i < two.first->centers(); ++i) centers.push_back({two.first->center_id(i), 1});
    const auto b = loss_behaviors(LossSpec::rho_threshold(Rational(1, 4)), two.cls, two.first_adversary, centers);
    for (std::size_t j = 0; j < two.first_family_size; ++j) {
        int ones = 0;
        for (std::size_t i = 0; i < centers.size(); ++i) ones += b.at(j, i);
        CHECK(ones == 1);
    }
    CHECK_THROWS_AS((void)build_two_block(2, 2, Rational(1, 4)), ValidationError);
}

TEST_CASE("sine margin is one at zero frequency and zero otherwise") {
    CHECK(sine_margin(0.0, 0.7) == 1.0);
    CHECK(sine_margin(3.0, 0.0) == 1.0);
    Rng rng(91);
    for (int trial = 0; trial < 200; ++trial) {
        const double omega = 20.0 * uniform01(rng) + 1e-3;
        const double x = 2.0 * uniform01(rng) - 1.0;
        if (x == 0.0) continue;
        CHECK(sine_margin(omega, x) == 0.0);
        CHECK(sine_margin(-omega, x) == sine_margin(omega, x));
        CHECK(sine_margin(omega, -x) == sine_margin(omega, x));
        CHECK(sine_margin(2.0 * omega, x / 2.0) == sine_margin(omega, x));
    }
}

TEST_CASE("sine classes realize every sign pattern on well-spread points") {
    // Points 2^-i can be shattered by sign(sin(omega x)) for suitable omega.
    std::vector<double> omegas;
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
        double omega = 0.0;
        for (int i = 0; i < 4; ++i) {
            if (((mask >> i) & 1) == 0) omega += std::ldexp(1.0, i + 1);
        }
        omegas.push_back(std::numbers::pi * (omega + 1.0));
    }
    std::vector<Instance> pts;
    for (int i = 0; i < 4; ++i) pts.emplace_back(Vector{std::ldexp(1.0, -(i + 1))});
    CHECK(vc_dimension(HypothesisClass::sine_grid(omegas), pts, 4).dimension == 4);
}

TEST_CASE("converting perturbation sets to functions and back is the identity") {
    Rng rng(92);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        PerturbationSets u;
        std::vector<PointId> domain;
        for (PointId x = 0; x < n; ++x) {
            domain.push_back(10 + x);
            std::set<PointId> images{10 + x};
            const std::size_t extra = rng() % n;
            for (std::size_t e = 0; e < extra; ++e) images.insert(10 + rng() % n);
            u[10 + x] = std::vector<PointId>(images.begin(), images.end());
        }
        const auto g = g_u_convert(u);
        CHECK(induced_sets(g, domain) == u);
        for (const auto& map : g) CHECK(map.pairs.size() == n);
        std::set<std::vector<std::pair<PointId, PointId>>> distinct;
        for (const auto& map : g) distinct.insert(map.pairs);
        CHECK(distinct.size() == g.size());
    }
}

TEST_CASE("perturbation sets must be non-empty and closed") {
    CHECK_THROWS_AS((void)g_u_convert({{1, {}}}), ValidationError);
    CHECK_THROWS_AS((void)g_u_convert({{1, {1, 2}}}), ValidationError);
    CHECK(g_u_convert({{1, {1}}}).size() == 1);
}
