#include "probrobust/constructions.hpp"

#include "probrobust/errors.hpp"

#include <algorithm>
#include <set>

namespace probrobust {
namespace {

std::vector<Instance> geometry_domain(const ConstructionGeometry& g) {
    std::vector<Instance> out;
    for (PointId id = g.first_id(); id < g.end_id(); ++id) out.emplace_back(id);
    return out;
}

}  // namespace

FiniteAtoms construction_adversary(const ConstructionGeometry& geometry) {
    std::vector<Atom> atoms;
    atoms.reserve(geometry.atom_count());
    for (std::size_t a = 0; a < geometry.atom_count(); ++a) {
        ImageMap map;
        map.pairs.reserve(geometry.centers());
        for (std::size_t i = 0; i < geometry.centers(); ++i) map.pairs.emplace_back(geometry.center_id(i), geometry.image_id(i, a));
        atoms.push_back({std::move(map), geometry.blocks()[a].weight});
    }
    return FiniteAtoms(std::move(atoms));
}

ConstructionInstance build_construction(std::size_t centers, Rational rho, std::optional<std::size_t> weight) {
    auto geometry = std::make_shared<const ConstructionGeometry>(centers, rho);
    Dataset center_examples;
    for (std::size_t i = 0; i < centers; ++i) center_examples.push_back({geometry->center_id(i), 1});
    return ConstructionInstance{geometry, construction_adversary(*geometry),
                                HypothesisClass::construction(geometry, weight), std::move(center_examples),
                                geometry_domain(*geometry)};
}

TwoBlockInstance build_two_block(std::size_t m1, std::size_t m2, Rational rho) {
    if (m1 == 0 || m2 == 0 || m1 == m2) throw ValidationError("two-block demonstration needs distinct m1, m2 >= 1");
    auto first = std::make_shared<const ConstructionGeometry>(3 * m1, rho, true, 0);
    auto second = std::make_shared<const ConstructionGeometry>(3 * m2, rho, true, first->end_id());

    const auto foreign_negatives = [](const ConstructionGeometry& g) {
        std::vector<PointId> ids;
        for (std::size_t i = 0; i < g.centers(); ++i) {
            for (std::size_t a = 0; a < g.atom_count(); ++a) {
                const auto kind = g.blocks()[a].kind;
                if (kind == ConstructionGeometry::BlockKind::non_robust ||
                    kind == ConstructionGeometry::BlockKind::reserve) {
                    ids.push_back(g.image_id(i, a));
                }
            }
        }
        return ids;
    };

    std::vector<Hypothesis> members;
    std::size_t first_family = 0;
    for (const auto& [own, other, m] : {std::tuple{first, second, m1}, std::tuple{second, first, m2}}) {
        const HypothesisClass family = HypothesisClass::construction(own, m);
        const std::vector<PointId> foreign = foreign_negatives(*other);
        for (std::size_t j = 0; j < family.size(); ++j) {
            const auto bits = std::get<ConstructionHypothesis>(family.member(j).variant()).bits;
            std::vector<std::pair<PointId, int>> entries;
            for (PointId id = own->first_id(); id < own->end_id(); ++id) {
                if (own->label(bits, id) < 0) entries.emplace_back(id, -1);
            }
            for (const PointId id : foreign) entries.emplace_back(id, -1);
            members.push_back(Hypothesis::table(std::move(entries), 1));
        }
        if (own == first) first_family = members.size();
    }

    std::vector<Instance> domain = geometry_domain(*first);
    for (auto& x : geometry_domain(*second)) domain.push_back(std::move(x));
    return TwoBlockInstance{first,
                            second,
                            construction_adversary(*first),
                            construction_adversary(*second),
                            HypothesisClass::explicit_list(std::move(members)),
                            first_family,
                            std::move(domain)};
}

double sine_margin(double omega, double x) {
    return smoothed_margin(Hypothesis::sine(omega), UniformScaling{}, LabeledExample{Vector{x}, 1}, 0);
}

std::vector<ImageMap> g_u_convert(const PerturbationSets& u) {
    std::map<PointId, PointId> representative;
    for (const auto& [x, images] : u) {
        if (images.empty()) throw ValidationError("perturbation set of point " + std::to_string(x) + " is empty");
        for (const PointId z : images) {
            if (u.find(z) == u.end()) throw ValidationError("perturbation image " + std::to_string(z) + " is outside the domain");
        }
        representative[x] = *std::min_element(images.begin(), images.end());
    }
    std::set<std::vector<std::pair<PointId, PointId>>> seen;
    std::vector<ImageMap> out;
    for (const auto& [x, images] : u) {
        for (const PointId z : std::set<PointId>(images.begin(), images.end())) {
            ImageMap g;
            for (const auto& [t, rep] : representative) g.pairs.emplace_back(t, t == x ? z : rep);
            if (seen.insert(g.pairs).second) out.push_back(std::move(g));
        }
    }
    return out;
}

PerturbationSets induced_sets(const std::vector<ImageMap>& g, const std::vector<PointId>& domain) {
    PerturbationSets out;
    for (const PointId x : domain) {
        std::set<PointId> images;
        for (const auto& map : g) images.insert(map.apply(x));
        out[x] = std::vector<PointId>(images.begin(), images.end());
    }
    return out;
}

}  // namespace probrobust
