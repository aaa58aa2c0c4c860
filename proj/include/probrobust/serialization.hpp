#pragma once

// JSON shapes for every artifact the command line reads or writes.
//
//   rational      {"num": 1, "den": 4}
//   instance      [x0, x1, ...] for vectors, a bare integer for point ids
//   example       {"x": instance, "y": +-1}
//   hypothesis    {"variant": "halfspace", "w": [...]}
//                 {"variant": "table", "table": [[id, label], ...], "default": +-1}
//                 {"variant": "sine", "omega": w}
//                 {"variant": "construction", "bits": "0110", "geometry": geometry}
//   geometry      {"centers": k, "rho": rational, "reserve": bool, "first_id": id}
//   adversary     {"variant": "finite_atoms", "atoms": [{"delta": [...] | "map": [[from, to], ...],
//                                                        "weight": rational}, ...]}
//                 {"variant": "lp_ball", "p": 2 | "inf", "gamma": g, "n_mc": n, "seed": s}
//                 {"variant": "uniform_scaling"}
//   class         {"variant": "explicit", "members": [hypothesis, ...]}
//                 {"variant": "halfspace_grid", "dim": d, "directions": [[...], ...]}
//                 {"variant": "sine_grid", "omegas": [...]}
//                 {"variant": "construction", "geometry": geometry, "weight": k | null}
//   loss          {"variant": "rho", "rho": rational} and so on, plus "text" in loss grammar
//   distribution  {"variant": "finite", "points": [example, ...], "weights": [rational, ...]}
//                 {"variant": "synthetic", "generator": name, "params": {...}, "seed": s,
//                  "eval_samples": n}
//   sets          [{"x": id, "images": [id, ...]}, ...]
//
// Readers throw ParseError for shape problems and let the constructors throw
// ValidationError for invariant violations.

#include "probrobust/constructions.hpp"
#include "probrobust/core.hpp"
#include "probrobust/learners.hpp"
#include "probrobust/losses.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace probrobust::io {

using Json = nlohmann::json;

[[nodiscard]] Json to_json(const Rational& r);
[[nodiscard]] Rational rational_from_json(const Json& j);

[[nodiscard]] Json to_json(const Instance& x);
[[nodiscard]] Instance instance_from_json(const Json& j);
[[nodiscard]] Json to_json(const std::vector<Instance>& xs);
[[nodiscard]] std::vector<Instance> instances_from_json(const Json& j);

[[nodiscard]] Json to_json(const Dataset& data);
[[nodiscard]] Dataset dataset_from_json(const Json& j);

[[nodiscard]] Json to_json(const ConstructionGeometry& g);
[[nodiscard]] std::shared_ptr<const ConstructionGeometry> geometry_from_json(const Json& j);

[[nodiscard]] Json to_json(const Hypothesis& h);
[[nodiscard]] Hypothesis hypothesis_from_json(const Json& j);

[[nodiscard]] Json to_json(const Adversary& adv);
[[nodiscard]] Adversary adversary_from_json(const Json& j);

[[nodiscard]] Json to_json(const HypothesisClass& cls);
[[nodiscard]] HypothesisClass class_from_json(const Json& j);

[[nodiscard]] Json to_json(const LossSpec& spec);
[[nodiscard]] LossSpec loss_from_json(const Json& j);

[[nodiscard]] Json to_json(const Distribution& dist);
[[nodiscard]] Distribution distribution_from_json(const Json& j);

[[nodiscard]] Json to_json(const PerturbationSets& sets);
[[nodiscard]] PerturbationSets sets_from_json(const Json& j);

[[nodiscard]] Json to_json(const std::vector<ImageMap>& maps);

/// Reads and parses a JSON file; ParseError names the file on failure.
[[nodiscard]] Json read_json(const std::filesystem::path& path);
/// Pretty-printed with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace probrobust::io
