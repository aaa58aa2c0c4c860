#pragma once

#include "probrobust/core.hpp"
#include "probrobust/learners.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace probrobust {

/// Everything the blow-up construction produces.
struct ConstructionInstance {
    std::shared_ptr<const ConstructionGeometry> geometry;
    Adversary adversary;
    HypothesisClass cls;
    Dataset centers;              // (c_i, +1)
    std::vector<Instance> domain; // centers followed by every image point
};

/// Shared image-map adversary over the geometry: atom a sends center i to
/// image(i, a) with the block weight of a. Every other point is fixed.
[[nodiscard]] FiniteAtoms construction_adversary(const ConstructionGeometry& geometry);

/// `centers` is the bitstring length (m for the blow-up construction, 3m for the
/// hard-distribution family). `weight` restricts the class to bitstrings with
/// that many ones; without it the full class of 2^centers members is built,
/// which is limited to 20 centers by the geometry and to the budget by the
/// learners.
[[nodiscard]] ConstructionInstance build_construction(std::size_t centers, Rational rho,
                                                      std::optional<std::size_t> weight = std::nullopt);

/// Two constructions side by side (bit lengths 3*m1 and 3*m2, disjoint ids),
/// each with a reserve block. Members of one family additionally label the
/// other family's non-robust and reserve images -1, and each family keeps
/// only bitstrings of weight m. Materialized as lookup tables.
struct TwoBlockInstance {
    std::shared_ptr<const ConstructionGeometry> first;
    std::shared_ptr<const ConstructionGeometry> second;
    Adversary first_adversary;
    Adversary second_adversary;
    HypothesisClass cls;           // first family, then second
    std::size_t first_family_size = 0;
    std::vector<Instance> domain;  // every center and image of both
};

[[nodiscard]] TwoBlockInstance build_two_block(std::size_t m1, std::size_t m2, Rational rho);

/// E_{c ~ U[-1,1]} sign(sin(omega c x)) by antithetic pairing: exactly 0
/// when omega * x != 0 and exactly 1 otherwise.
[[nodiscard]] double sine_margin(double omega, double x);

/// U(x) for each point of a finite domain (the keys).
using PerturbationSets = std::map<PointId, std::vector<PointId>>;

/// Builds the functions g^x_z (x -> z, every other t -> the smallest member
/// of U(t)) for all x and z in U(x), duplicates removed. Each function is
/// total on the domain. Throws ValidationError on an empty U(x) or an image
/// outside the domain.
[[nodiscard]] std::vector<ImageMap> g_u_convert(const PerturbationSets& u);

/// {g(x) : g in G} for every domain point.
[[nodiscard]] PerturbationSets induced_sets(const std::vector<ImageMap>& g, const std::vector<PointId>& domain);

}  // namespace probrobust
