#pragma once

#include "probrobust/rational.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace probrobust {

enum class ExperimentKind { uc, sandwich, relaxed_competition, tolerant, lowerbound, sine, finite_g };

[[nodiscard]] const char* experiment_name(ExperimentKind kind) noexcept;
[[nodiscard]] ExperimentKind parse_experiment_kind(const std::string& name);

/// Flat parameter set shared by every experiment kind. Unset optionals take
/// per-kind defaults in `with_defaults`; a key that a kind does not use is
/// rejected there, so typos surface as errors.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::uc;
    std::optional<std::uint64_t> seed;

    std::optional<std::size_t> trials;       // per sample size / per round
    std::vector<std::size_t> sizes;          // strictly increasing; empty = harness chooses
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<Rational> rho;
    std::optional<Rational> rho_star;
    std::optional<double> r;                 // tolerant radius
    std::optional<std::string> loss;        // loss grammar
    std::optional<std::string> scenario;     // relaxed_competition: hard_family | random_atoms
    std::optional<std::string> rule;         // relaxed_competition: prerm | rerm
    std::optional<std::size_t> m;            // lowerbound / hard_family geometry
    std::optional<std::size_t> distributions;
    std::optional<std::size_t> dim;
    std::optional<std::size_t> class_size;
    std::vector<std::size_t> atoms;          // K values (finite_g) or a single K
    std::optional<double> radius;            // translation atom radius
    std::optional<std::size_t> support;      // finite support size
    std::optional<double> noise;
    std::optional<std::size_t> n_cap;        // doubling stops above this n

    /// Raw key=value pairs that were read but not recognized.
    std::map<std::string, std::string> unknown;
};

/// Parses either a JSON object or `key = value` lines (# comments, lists as
/// comma-separated values). Throws ParseError on malformed input.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets one key from its text form, as a config line would. Unknown keys go
/// to `unknown`; malformed values throw ParseError.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Fills defaults for the kind and validates: sizes strictly increasing,
/// trials >= 1, 0 <= rho* < rho < 1, known scenario/rule names, no unknown
/// keys. Throws ValidationError.
[[nodiscard]] ExperimentConfig with_defaults(ExperimentConfig cfg);

[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& cfg);

/// One row of trials.csv. `extra` holds the per-kind side values that the
/// checks need (phase, distribution index, K, gaps, ...); it is persisted in
/// report.json so the verdict can be recomputed from the records alone.
struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double emp_risk = 0.0;
    double pop_risk = 0.0;
    double benchmark = 0.0;
    double excess = 0.0;
    std::map<std::string, double> extra;
};

struct Check {
    std::string name;
    std::string bound;       // human description of the bound being tested
    double value = 0.0;
    std::string comparison;  // "<=", ">=", "<", ">", "=="
    double threshold = 0.0;
    bool pass = false;
};

struct ExperimentReport {
    ExperimentConfig config;  // after defaults
    std::vector<TrialRecord> records;
    nlohmann::json aggregates;
    std::vector<Check> checks;
    bool verdict = false;
    std::vector<std::string> notes;
};

/// Runs the configured experiment with `jobs` worker threads (0 = all
/// cores). Records, aggregates and verdict do not depend on `jobs`.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t jobs);

/// Recomputes aggregates, checks and verdict from the records alone.
void aggregate(ExperimentReport& report);

[[nodiscard]] nlohmann::json to_json(const ExperimentReport& report);
/// Inverse of to_json for the config and records; aggregates and verdict are
/// recomputed, not trusted.
[[nodiscard]] ExperimentReport report_from_json(const nlohmann::json& j);

/// trial,seed,n,emp_risk,pop_risk,benchmark,excess with %.17g numbers.
[[nodiscard]] std::string trials_csv(const std::vector<TrialRecord>& records);

/// Writes report.json and trials.csv into `dir` (created if missing).
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace probrobust
