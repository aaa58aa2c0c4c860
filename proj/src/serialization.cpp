#include "probrobust/serialization.hpp"

#include "probrobust/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace probrobust::io {

namespace {

const Json& field(const Json& j, const char* name, const char* what) {
    if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
    const auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string(what) + " is missing field '" + name + "'");
    return *it;
}

std::string variant_of(const Json& j, const char* what) {
    const Json& v = field(j, "variant", what);
    if (!v.is_string()) throw ParseError(std::string(what) + " field 'variant' must be a string");
    return v.get<std::string>();
}

/// Converts nlohmann type errors into ParseError with some context.
template <class F>
auto guarded(const char* what, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed ") + what + ": " + e.what());
    }
}

Vector vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
    Vector v;
    v.reserve(j.size());
    for (const auto& c : j) {
        if (!c.is_number()) throw ParseError(std::string(what) + " must be an array of numbers");
        v.push_back(c.get<double>());
    }
    return v;
}

Json exponent_to_json(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

double exponent_from_json(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return INFINITY;
        throw ParseError("exponent p must be a number or \"inf\"");
    }
    return j.get<double>();
}

std::vector<std::pair<PointId, PointId>> id_pairs(const Json& j, const char* what) {
    std::vector<std::pair<PointId, PointId>> out;
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of [from, to] pairs");
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw ParseError(std::string(what) + " entries must be pairs");
        out.emplace_back(p[0].get<PointId>(), p[1].get<PointId>());
    }
    return out;
}

}  // namespace

Json to_json(const Rational& r) { return Json{{"num", r.num()}, {"den", r.den()}}; }

Rational rational_from_json(const Json& j) {
    return guarded("rational", [&] {
        if (j.is_string()) return Rational::parse(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
        return Rational(field(j, "num", "rational").get<std::int64_t>(), field(j, "den", "rational").get<std::int64_t>());
    });
}

Json to_json(const Instance& x) {
    if (const auto* v = std::get_if<Vector>(&x)) return Json(*v);
    return Json(std::get<PointId>(x));
}

Instance instance_from_json(const Json& j) {
    return guarded("instance", [&]() -> Instance {
        if (j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0)) return j.get<PointId>();
        return vector_from_json(j, "instance");
    });
}

Json to_json(const std::vector<Instance>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) out.push_back(to_json(x));
    return out;
}

std::vector<Instance> instances_from_json(const Json& j) {
    const Json& arr = j.is_object() ? field(j, "points", "point list") : j;
    if (!arr.is_array()) throw ParseError("point list must be an array");
    std::vector<Instance> out;
    for (const auto& x : arr) out.push_back(instance_from_json(x.is_object() ? field(x, "x", "example") : x));
    return out;
}

Json to_json(const Dataset& data) {
    Json out = Json::array();
    for (const auto& ex : data) out.push_back(Json{{"x", to_json(ex.x)}, {"y", ex.y}});
    return out;
}

Dataset dataset_from_json(const Json& j) {
    return guarded("dataset", [&] {
        const Json& arr = j.is_object() ? field(j, "examples", "dataset") : j;
        if (!arr.is_array()) throw ParseError("dataset must be an array of {x, y} objects");
        Dataset out;
        for (const auto& e : arr) {
            out.push_back({instance_from_json(field(e, "x", "example")),
                           checked_label(field(e, "y", "example").get<long long>())});
        }
        validate_dataset(out);
        return out;
    });
}

Json to_json(const ConstructionGeometry& g) {
    return Json{{"centers", g.centers()},
                {"rho", to_json(g.rho())},
                {"reserve", g.with_reserve()},
                {"first_id", g.first_id()}};
}

std::shared_ptr<const ConstructionGeometry> geometry_from_json(const Json& j) {
    return guarded("geometry", [&] {
        const bool reserve = j.contains("reserve") ? j.at("reserve").get<bool>() : false;
        const PointId first = j.contains("first_id") ? j.at("first_id").get<PointId>() : 0;
        return std::make_shared<const ConstructionGeometry>(field(j, "centers", "geometry").get<std::size_t>(),
                                                            rational_from_json(field(j, "rho", "geometry")), reserve,
                                                            first);
    });
}

Json to_json(const Hypothesis& h) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Halfspace>) {
                return Json{{"variant", "halfspace"}, {"w", v.w}};
            } else if constexpr (std::is_same_v<T, TableHypothesis>) {
                Json table = Json::array();
                for (const auto& [id, label] : v.entries) table.push_back(Json::array({id, label}));
                return Json{{"variant", "table"}, {"table", table}, {"default", v.fallback}};
            } else if constexpr (std::is_same_v<T, SineSign>) {
                return Json{{"variant", "sine"}, {"omega", v.omega}};
            } else {
                return Json{{"variant", "construction"},
                            {"bits", v.geometry->bits_to_string(v.bits)},
                            {"geometry", to_json(*v.geometry)}};
            }
        },
        h.variant());
}

Hypothesis hypothesis_from_json(const Json& j) {
    return guarded("hypothesis", [&] {
        const std::string variant = variant_of(j, "hypothesis");
        if (variant == "halfspace") return Hypothesis::halfspace(vector_from_json(field(j, "w", "halfspace"), "w"));
        if (variant == "sine") return Hypothesis::sine(field(j, "omega", "sine hypothesis").get<double>());
        if (variant == "table") {
            std::vector<std::pair<PointId, int>> entries;
            for (const auto& e : field(j, "table", "table hypothesis")) {
                if (!e.is_array() || e.size() != 2) throw ParseError("table entries must be [id, label] pairs");
                entries.emplace_back(e[0].get<PointId>(), static_cast<int>(e[1].get<long long>()));
            }
            const int fallback = j.contains("default") ? static_cast<int>(j.at("default").get<long long>()) : 1;
            return Hypothesis::table(std::move(entries), fallback);
        }
        if (variant == "construction") {
            auto g = geometry_from_json(field(j, "geometry", "construction hypothesis"));
            const std::uint64_t bits = g->bits_from_string(field(j, "bits", "construction hypothesis").get<std::string>());
            return Hypothesis::construction(bits, std::move(g));
        }
        throw ParseError("unknown hypothesis variant '" + variant + "'");
    });
}

Json to_json(const Adversary& adv) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FiniteAtoms>) {
                Json atoms = Json::array();
                for (const auto& a : v.atoms()) {
                    Json atom{{"weight", to_json(a.weight)}};
                    if (const auto* t = std::get_if<Translation>(&a.g)) {
                        atom["delta"] = t->delta;
                    } else {
                        Json map = Json::array();
                        for (const auto& [from, to] : std::get<ImageMap>(a.g).pairs) map.push_back(Json::array({from, to}));
                        atom["map"] = map;
                    }
                    atoms.push_back(std::move(atom));
                }
                return Json{{"variant", "finite_atoms"}, {"atoms", atoms}};
            } else if constexpr (std::is_same_v<T, LpBall>) {
                return Json{{"variant", "lp_ball"},
                            {"p", exponent_to_json(v.p)},
                            {"gamma", v.gamma},
                            {"n_mc", v.n_mc},
                            {"seed", v.seed}};
            } else {
                return Json{{"variant", "uniform_scaling"}};
            }
        },
        adv.variant());
}

Adversary adversary_from_json(const Json& j) {
    return guarded("adversary", [&]() -> Adversary {
        const std::string variant = variant_of(j, "adversary");
        if (variant == "uniform_scaling") return UniformScaling{};
        if (variant == "lp_ball") {
            LpBall ball;
            ball.p = exponent_from_json(field(j, "p", "lp_ball"));
            ball.gamma = field(j, "gamma", "lp_ball").get<double>();
            if (j.contains("n_mc")) ball.n_mc = j.at("n_mc").get<std::size_t>();
            if (j.contains("seed")) ball.seed = j.at("seed").get<std::uint64_t>();
            return ball;
        }
        if (variant == "finite_atoms") {
            std::vector<Atom> atoms;
            for (const auto& a : field(j, "atoms", "finite_atoms")) {
                const Rational w = rational_from_json(field(a, "weight", "atom"));
                if (a.contains("delta")) {
                    atoms.push_back({Translation{vector_from_json(a.at("delta"), "delta")}, w});
                } else if (a.contains("map")) {
                    auto pairs = id_pairs(a.at("map"), "map");
                    std::sort(pairs.begin(), pairs.end());
                    atoms.push_back({ImageMap{std::move(pairs)}, w});
                } else {
                    throw ParseError("atom needs either 'delta' or 'map'");
                }
            }
            return FiniteAtoms(std::move(atoms));
        }
        throw ParseError("unknown adversary variant '" + variant + "'");
    });
}

Json to_json(const HypothesisClass& cls) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ExplicitClass>) {
                Json members = Json::array();
                for (const auto& h : v.members) members.push_back(to_json(h));
                return Json{{"variant", "explicit"}, {"members", members}};
            } else if constexpr (std::is_same_v<T, HalfspaceGrid>) {
                return Json{{"variant", "halfspace_grid"}, {"dim", v.dim}, {"directions", v.directions}};
            } else if constexpr (std::is_same_v<T, SineGrid>) {
                return Json{{"variant", "sine_grid"}, {"omegas", v.omegas}};
            } else {
                return Json{{"variant", "construction"},
                            {"geometry", to_json(*v.geometry)},
                            {"weight", v.weight ? Json(*v.weight) : Json(nullptr)}};
            }
        },
        cls.variant());
}

HypothesisClass class_from_json(const Json& j) {
    return guarded("class", [&] {
        const std::string variant = variant_of(j, "class");
        if (variant == "explicit") {
            std::vector<Hypothesis> members;
            for (const auto& h : field(j, "members", "explicit class")) members.push_back(hypothesis_from_json(h));
            return HypothesisClass::explicit_list(std::move(members));
        }
        if (variant == "halfspace_grid") {
            std::vector<Vector> dirs;
            for (const auto& d : field(j, "directions", "halfspace grid")) dirs.push_back(vector_from_json(d, "direction"));
            return HypothesisClass::halfspace_grid(std::move(dirs));
        }
        if (variant == "sine_grid") {
            return HypothesisClass::sine_grid(vector_from_json(field(j, "omegas", "sine grid"), "omegas"));
        }
        if (variant == "construction") {
            std::optional<std::size_t> weight;
            if (j.contains("weight") && !j.at("weight").is_null()) weight = j.at("weight").get<std::size_t>();
            return HypothesisClass::construction(geometry_from_json(field(j, "geometry", "construction class")), weight);
        }
        throw ParseError("unknown class variant '" + variant + "'");
    });
}

Json to_json(const LossSpec& spec) {
    Json out = std::visit(
        [](const auto& l) -> Json {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, WorstCaseLoss>) return Json{{"variant", "worst"}};
            else if constexpr (std::is_same_v<T, RhoThresholdLoss>) return Json{{"variant", "rho"}, {"rho", to_json(l.rho)}};
            else if constexpr (std::is_same_v<T, RampLoss>)
                return Json{{"variant", "ramp"}, {"rho", to_json(l.rho)}, {"rho_star", to_json(l.rho_star)}};
            else if constexpr (std::is_same_v<T, HingeLoss>) return Json{{"variant", "hinge"}};
            else if constexpr (std::is_same_v<T, SquaredLoss>) return Json{{"variant", "squared"}};
            else if constexpr (std::is_same_v<T, ExponentialLoss>) return Json{{"variant", "exp"}};
            else if constexpr (std::is_same_v<T, LinearAverageLoss>) return Json{{"variant", "avg"}};
            else return Json{{"variant", "scaled"}, {"rho", to_json(l.rho)}};
        },
        spec.variant());
    out["text"] = spec.to_string();
    return out;
}

LossSpec loss_from_json(const Json& j) {
    return guarded("loss", [&] {
        if (j.is_string()) return LossSpec::parse(j.get<std::string>());
        const std::string variant = variant_of(j, "loss");
        if (variant == "rho") return LossSpec::rho_threshold(rational_from_json(field(j, "rho", "loss")));
        if (variant == "ramp") {
            return LossSpec::ramp(rational_from_json(field(j, "rho", "loss")),
                                  rational_from_json(field(j, "rho_star", "loss")));
        }
        if (variant == "scaled") return LossSpec::scaled_ramp(rational_from_json(field(j, "rho", "loss")));
        return LossSpec::parse(variant);
    });
}

Json to_json(const Distribution& dist) {
    if (const auto* s = dist.support()) {
        Json weights = Json::array();
        for (const auto& w : s->weights) weights.push_back(to_json(w));
        return Json{{"variant", "finite"}, {"points", to_json(s->points)}, {"weights", weights}};
    }
    const auto& spec = std::get<SyntheticSpec>(dist.variant());
    return Json{{"variant", "synthetic"},
                {"generator", spec.generator},
                {"params", spec.params},
                {"seed", spec.seed},
                {"eval_samples", spec.eval_samples}};
}

Distribution distribution_from_json(const Json& j) {
    return guarded("distribution", [&] {
        const std::string variant = variant_of(j, "distribution");
        if (variant == "finite") {
            Dataset points = dataset_from_json(field(j, "points", "finite distribution"));
            if (!j.contains("weights")) return Distribution::uniform(std::move(points));
            std::vector<Rational> weights;
            for (const auto& w : j.at("weights")) weights.push_back(rational_from_json(w));
            return Distribution::finite(std::move(points), std::move(weights));
        }
        if (variant == "synthetic") {
            SyntheticSpec spec;
            spec.generator = field(j, "generator", "synthetic distribution").get<std::string>();
            if (j.contains("params")) spec.params = j.at("params").get<std::map<std::string, double>>();
            if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("eval_samples")) spec.eval_samples = j.at("eval_samples").get<std::size_t>();
            return Distribution::synthetic(std::move(spec));
        }
        throw ParseError("unknown distribution variant '" + variant + "'");
    });
}

Json to_json(const PerturbationSets& sets) {
    Json out = Json::array();
    for (const auto& [x, images] : sets) out.push_back(Json{{"x", x}, {"images", images}});
    return out;
}

PerturbationSets sets_from_json(const Json& j) {
    return guarded("perturbation sets", [&] {
        if (!j.is_array()) throw ParseError("perturbation sets must be an array of {x, images}");
        PerturbationSets out;
        for (const auto& e : j) {
            const PointId x = field(e, "x", "perturbation set").get<PointId>();
            if (!out.emplace(x, field(e, "images", "perturbation set").get<std::vector<PointId>>()).second) {
                throw ParseError("point " + std::to_string(x) + " has two perturbation sets");
            }
        }
        return out;
    });
}

Json to_json(const std::vector<ImageMap>& maps) {
    Json out = Json::array();
    for (const auto& g : maps) {
        Json pairs = Json::array();
        for (const auto& [from, to] : g.pairs) pairs.push_back(Json::array({from, to}));
        out.push_back(Json{{"map", pairs}});
    }
    return out;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

}  // namespace probrobust::io
