#include "probrobust/experiments.hpp"

#include "probrobust/complexity.hpp"
#include "probrobust/constructions.hpp"
#include "probrobust/errors.hpp"
#include "probrobust/learners.hpp"
#include "probrobust/losses.hpp"
#include "probrobust/parallel.hpp"
#include "probrobust/serialization.hpp"
#include "probrobust/simd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace probrobust {

using Json = nlohmann::json;

// ------------------------------------------------------------------ config

const char* experiment_name(ExperimentKind kind) noexcept {
    switch (kind) {
        case ExperimentKind::uc: return "uc";
        case ExperimentKind::sandwich: return "sandwich";
        case ExperimentKind::relaxed_competition: return "relaxed_competition";
        case ExperimentKind::tolerant: return "tolerant";
        case ExperimentKind::lowerbound: return "lowerbound";
        case ExperimentKind::sine: return "sine";
        case ExperimentKind::finite_g: return "finite_g";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::uc, ExperimentKind::sandwich, ExperimentKind::relaxed_competition,
                   ExperimentKind::tolerant, ExperimentKind::lowerbound, ExperimentKind::sine,
                   ExperimentKind::finite_g}) {
        if (name == experiment_name(k)) return k;
    }
    throw ParseError("unknown experiment kind '" + name +
                     "' (expected uc|sandwich|relaxed_competition|tolerant|lowerbound|sine|finite_g)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    std::uint64_t out = 0;
    try {
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ParseError("'" + key + "' expects a non-negative integer, got '" + v + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ParseError("'" + key + "' expects a number, got '" + v + "'");
    return out;
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_uint(key, trim(item)));
    if (out.empty()) throw ParseError("'" + key + "' expects a comma-separated list");
    return out;
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
    if (key == "kind" || key == "experiment") c.kind = parse_experiment_kind(v);
    else if (key == "seed") c.seed = parse_uint(key, v);
    else if (key == "trials") c.trials = parse_uint(key, v);
    else if (key == "sizes") c.sizes = parse_list(key, v);
    else if (key == "epsilon") c.epsilon = parse_real(key, v);
    else if (key == "delta") c.delta = parse_real(key, v);
    else if (key == "rho") c.rho = Rational::parse(v);
    else if (key == "rho_star") c.rho_star = Rational::parse(v);
    else if (key == "r") c.r = parse_real(key, v);
    else if (key == "loss") c.loss = v;
    else if (key == "scenario") c.scenario = v;
    else if (key == "rule") c.rule = v;
    else if (key == "m") c.m = parse_uint(key, v);
    else if (key == "distributions") c.distributions = parse_uint(key, v);
    else if (key == "dim") c.dim = parse_uint(key, v);
    else if (key == "class_size") c.class_size = parse_uint(key, v);
    else if (key == "atoms") c.atoms = parse_list(key, v);
    else if (key == "radius") c.radius = parse_real(key, v);
    else if (key == "support") c.support = parse_uint(key, v);
    else if (key == "noise") c.noise = parse_real(key, v);
    else if (key == "n_cap") c.n_cap = parse_uint(key, v);
    else c.unknown[key] = v;
}

/// JSON scalars and arrays flattened to the key=value text form.
std::string json_value_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) out += (out.empty() ? "" : ",") + json_value_text(e);
        return out;
    }
    if (v.is_object() && v.contains("num") && v.contains("den")) {
        return v.at("num").dump() + "/" + v.at("den").dump();
    }
    return v.dump();
}

std::vector<std::string> keys_set(const ExperimentConfig& c) {
    std::vector<std::string> out;
    const auto note = [&](bool set, const char* name) {
        if (set) out.emplace_back(name);
    };
    note(c.seed.has_value(), "seed");
    note(c.trials.has_value(), "trials");
    note(!c.sizes.empty(), "sizes");
    note(c.epsilon.has_value(), "epsilon");
    note(c.delta.has_value(), "delta");
    note(c.rho.has_value(), "rho");
    note(c.rho_star.has_value(), "rho_star");
    note(c.r.has_value(), "r");
    note(c.loss.has_value(), "loss");
    note(c.scenario.has_value(), "scenario");
    note(c.rule.has_value(), "rule");
    note(c.m.has_value(), "m");
    note(c.distributions.has_value(), "distributions");
    note(c.dim.has_value(), "dim");
    note(c.class_size.has_value(), "class_size");
    note(!c.atoms.empty(), "atoms");
    note(c.radius.has_value(), "radius");
    note(c.support.has_value(), "support");
    note(c.noise.has_value(), "noise");
    note(c.n_cap.has_value(), "n_cap");
    return out;
}

std::set<std::string> allowed_keys(ExperimentKind kind) {
    std::set<std::string> keys{"seed", "trials"};
    const auto add = [&](std::initializer_list<const char*> more) {
        for (const char* k : more) keys.insert(k);
    };
    switch (kind) {
        case ExperimentKind::uc: add({"sizes", "loss", "dim", "class_size", "atoms", "radius", "support", "noise"}); break;
        case ExperimentKind::sandwich: break;
        case ExperimentKind::relaxed_competition:
            add({"epsilon", "delta", "rho", "rho_star", "scenario", "rule", "m", "atoms", "class_size", "support", "n_cap"});
            break;
        case ExperimentKind::tolerant: add({"epsilon", "delta", "r", "dim", "class_size", "support", "noise", "n_cap"}); break;
        case ExperimentKind::lowerbound: add({"m", "rho", "distributions"}); break;
        case ExperimentKind::sine: add({"epsilon", "delta", "class_size", "support", "noise", "loss", "n_cap"}); break;
        case ExperimentKind::finite_g:
            add({"sizes", "epsilon", "delta", "rho", "atoms", "radius", "dim", "class_size", "support", "noise", "n_cap"});
            break;
    }
    return keys;
}

template <class T>
void fill(std::optional<T>& slot, T value) {
    if (!slot) slot = std::move(value);
}

}  // namespace

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    set_key(cfg, key, value);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    bool have_kind = false;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::exception& e) {
            throw ParseError(std::string("experiment config is not valid JSON: ") + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            set_key(cfg, key, json_value_text(value));
            have_kind = have_kind || key == "kind" || key == "experiment";
        }
    } else {
        std::stringstream ss(text);
        std::string line;
        std::size_t number = 0;
        while (std::getline(ss, line)) {
            ++number;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError("config line " + std::to_string(number) + " has no '='");
            const std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
            set_key(cfg, key, value);
            have_kind = have_kind || key == "kind" || key == "experiment";
        }
    }
    if (!have_kind) throw ParseError("experiment config must name its kind");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentConfig with_defaults(ExperimentConfig c) {
    if (!c.unknown.empty()) throw ValidationError("unknown config key '" + c.unknown.begin()->first + "'");
    const auto allowed = allowed_keys(c.kind);
    for (const auto& key : keys_set(c)) {
        if (!allowed.contains(key)) {
            throw ValidationError("config key '" + key + "' does not apply to experiment " + experiment_name(c.kind));
        }
    }
    if (!c.seed) throw ValidationError("experiment needs an explicit seed");

    switch (c.kind) {
        case ExperimentKind::uc:
            fill(c.trials, std::size_t{200});
            if (c.sizes.empty()) c.sizes = {250, 1000, 4000};
            fill(c.loss, std::string("hinge"));
            fill(c.dim, std::size_t{2});
            fill(c.class_size, std::size_t{40});
            if (c.atoms.empty()) c.atoms = {8};
            fill(c.radius, 0.2);
            fill(c.support, std::size_t{400});
            fill(c.noise, 0.1);
            break;
        case ExperimentKind::sandwich: fill(c.trials, std::size_t{10000}); break;
        case ExperimentKind::relaxed_competition:
            fill(c.trials, std::size_t{500});
            fill(c.epsilon, 0.1);
            fill(c.delta, 0.1);
            fill(c.scenario, std::string("random_atoms"));
            fill(c.rule, std::string("prerm"));
            fill(c.rho, Rational(1, 2));
            if (*c.rule == "prerm") fill(c.rho_star, Rational(1, 4));
            if (*c.scenario == "hard_family") {
                fill(c.m, std::size_t{4});
            } else {
                if (c.atoms.empty()) c.atoms = {6};
                fill(c.class_size, std::size_t{32});
                fill(c.support, std::size_t{12});
            }
            fill(c.n_cap, std::size_t{50000});
            break;
        case ExperimentKind::tolerant:
            fill(c.trials, std::size_t{200});
            fill(c.epsilon, 0.1);
            fill(c.delta, 0.1);
            fill(c.r, 0.2);
            fill(c.dim, std::size_t{2});
            fill(c.class_size, std::size_t{30});
            fill(c.support, std::size_t{60});
            fill(c.noise, 0.1);
            fill(c.n_cap, std::size_t{50000});
            break;
        case ExperimentKind::lowerbound:
            fill(c.trials, std::size_t{500});
            fill(c.m, std::size_t{4});
            fill(c.rho, Rational(1, 4));
            fill(c.distributions, std::size_t{20});
            break;
        case ExperimentKind::sine:
            fill(c.trials, std::size_t{200});
            fill(c.epsilon, 0.05);
            fill(c.delta, 0.05);
            fill(c.class_size, std::size_t{21});
            fill(c.support, std::size_t{50});
            fill(c.noise, 0.2);
            fill(c.loss, std::string("hinge"));
            fill(c.n_cap, std::size_t{50000});
            break;
        case ExperimentKind::finite_g:
            fill(c.trials, std::size_t{200});
            if (c.sizes.empty()) c.sizes = {500};
            fill(c.epsilon, 0.1);
            fill(c.delta, 0.1);
            fill(c.rho, Rational(1, 4));
            if (c.atoms.empty()) c.atoms = {4, 16, 64};
            fill(c.radius, 0.3);
            fill(c.dim, std::size_t{2});
            fill(c.class_size, std::size_t{20});
            fill(c.support, std::size_t{200});
            fill(c.noise, 0.1);
            fill(c.n_cap, std::size_t{50000});
            break;
    }

    if (*c.trials == 0) throw ValidationError("trials must be at least 1");
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        if (c.sizes[i] == 0) throw ValidationError("sample sizes must be positive");
        if (i > 0 && c.sizes[i] <= c.sizes[i - 1]) throw ValidationError("sample sizes must be strictly increasing");
    }
    if (c.rho && (c.rho->num() < 0 || !(*c.rho < Rational(1)))) throw ValidationError("rho must lie in [0, 1)");
    if (c.rho_star && c.rho_star->num() < 0) throw ValidationError("rho_star must be non-negative");
    if (c.rho && c.rho_star && !(*c.rho_star < *c.rho)) throw ValidationError("need 0 <= rho_star < rho < 1");
    for (const auto* v : {&c.epsilon, &c.delta}) {
        if (*v && !(**v > 0.0 && **v < 1.0)) throw ValidationError("epsilon and delta must lie in (0, 1)");
    }
    if (c.r && !(*c.r > 0.0)) throw ValidationError("r must be positive");
    if (c.radius && !(*c.radius > 0.0)) throw ValidationError("radius must be positive");
    if (c.noise && !(*c.noise >= 0.0 && *c.noise <= 1.0)) throw ValidationError("noise must lie in [0, 1]");
    for (const auto k : c.atoms) {
        if (k == 0) throw ValidationError("atom counts must be positive");
    }
    if (c.dim && *c.dim == 0) throw ValidationError("dim must be positive");
    if (c.class_size && *c.class_size == 0) throw ValidationError("class_size must be positive");
    if (c.support && *c.support == 0) throw ValidationError("support must be positive");
    if (c.m && (*c.m == 0 || 3 * *c.m > ConstructionGeometry::max_centers)) {
        throw ValidationError("m must lie in [1, 6] so that 3m centers fit the geometry");
    }
    if (c.distributions && *c.distributions == 0) throw ValidationError("distributions must be positive");
    if (c.loss) (void)LossSpec::parse(*c.loss);
    if (c.kind == ExperimentKind::uc && !lipschitz_constant(LossSpec::parse(*c.loss))) {
        throw ValidationError("uniform convergence experiment needs a Lipschitz loss");
    }
    if (c.scenario && *c.scenario != "hard_family" && *c.scenario != "random_atoms") {
        throw ValidationError("scenario must be hard_family or random_atoms");
    }
    if (c.rule && *c.rule != "prerm" && *c.rule != "rerm") throw ValidationError("rule must be prerm or rerm");
    if (c.rule && *c.rule == "prerm" && !c.rho_star) throw ValidationError("prerm needs rho_star");
    return c;
}

Json to_json(const ExperimentConfig& c) {
    Json j{{"kind", experiment_name(c.kind)}};
    if (c.seed) j["seed"] = *c.seed;
    if (c.trials) j["trials"] = *c.trials;
    if (!c.sizes.empty()) j["sizes"] = c.sizes;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    if (c.delta) j["delta"] = *c.delta;
    if (c.rho) j["rho"] = io::to_json(*c.rho);
    if (c.rho_star) j["rho_star"] = io::to_json(*c.rho_star);
    if (c.r) j["r"] = *c.r;
    if (c.loss) j["loss"] = *c.loss;
    if (c.scenario) j["scenario"] = *c.scenario;
    if (c.rule) j["rule"] = *c.rule;
    if (c.m) j["m"] = *c.m;
    if (c.distributions) j["distributions"] = *c.distributions;
    if (c.dim) j["dim"] = *c.dim;
    if (c.class_size) j["class_size"] = *c.class_size;
    if (!c.atoms.empty()) j["atoms"] = c.atoms;
    if (c.radius) j["radius"] = *c.radius;
    if (c.support) j["support"] = *c.support;
    if (c.noise) j["noise"] = *c.noise;
    if (c.n_cap) j["n_cap"] = *c.n_cap;
    return j;
}

// ------------------------------------------------------------ machinery

namespace {

/// Pointwise losses of every class member on every support point, with the
/// population risk of each member as the weighted row sum.
struct LossTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major: support point, then member
    std::vector<double> pop;

    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

    /// Empirical risk of every member on the sample given by support indices.
    [[nodiscard]] std::vector<double> sample_risks(const std::vector<std::size_t>& indices) const {
        std::vector<double> counts(rows, 0.0);
        for (const auto i : indices) counts[i] += 1.0;
        std::vector<double> acc(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            if (counts[i] > 0.0) simd::accumulate(acc, row(i), counts[i]);
        }
        for (double& v : acc) v /= static_cast<double>(indices.size());
        return acc;
    }
};

LossTable make_table(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv,
                     const FiniteSupport& support, std::size_t jobs) {
    const LossMatrix m = loss_matrix(spec, cls, adv, support.points, 0, jobs, std::numeric_limits<std::size_t>::max());
    LossTable t{m.examples, m.functions, m.values, std::vector<double>(m.functions, 0.0)};
    for (std::size_t i = 0; i < t.rows; ++i) simd::accumulate(t.pop, t.row(i), support.weights[i].to_double());
    return t;
}

std::size_t argmin_lowest(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t index) {
    return derive_seed(*c.seed, experiment_name(c.kind), index);
}

std::uint64_t instance_seed(const ExperimentConfig& c, std::string_view what, std::uint64_t index = 0) {
    return derive_seed(*c.seed, std::string(experiment_name(c.kind)) + "/" + std::string(what), index);
}

/// Sample size from the bound shape complexity / eps^2 with constant 1.
std::size_t bound_n(double complexity, double epsilon) {
    return static_cast<std::size_t>(std::ceil(complexity / (epsilon * epsilon)));
}

/// Positive integer shares of `total` in `parts` pieces.
std::vector<std::int64_t> random_partition(std::int64_t total, std::size_t parts, Rng& rng) {
    std::vector<std::int64_t> cuts;
    std::set<std::int64_t> chosen;
    std::uniform_int_distribution<std::int64_t> pick(1, total - 1);
    while (chosen.size() + 1 < parts) chosen.insert(pick(rng));
    std::int64_t previous = 0;
    std::vector<std::int64_t> out;
    for (const auto c : chosen) {
        out.push_back(c - previous);
        previous = c;
    }
    out.push_back(total - previous);
    return out;
}

Vector random_unit(std::size_t d, Rng& rng) {
    std::normal_distribution<double> normal;
    Vector v(d);
    double norm = 0.0;
    do {
        for (double& c : v) c = normal(rng);
        norm = lp_norm(v, 2.0);
    } while (norm == 0.0);
    for (double& c : v) c /= norm;
    return v;
}

FiniteAtoms random_translations(std::size_t k, std::size_t d, double radius, Rng& rng) {
    std::vector<Vector> deltas;
    for (std::size_t i = 0; i < k; ++i) {
        Vector delta(d);
        for (double& c : delta) c = (2.0 * uniform01(rng) - 1.0) * radius;
        deltas.push_back(std::move(delta));
    }
    return FiniteAtoms::uniform_translations(std::move(deltas));
}

/// Uniform support of noisy linearly labeled points in [-scale, scale]^d.
/// With `min_margin` > 0 points closer than that to the target hyperplane
/// are redrawn and no label noise is applied.
FiniteSupport linear_support(std::size_t n, std::size_t d, const Vector& target, double noise, double scale,
                             double min_margin, Rng& rng) {
    FiniteSupport s;
    while (s.points.size() < n) {
        Vector x(d);
        for (double& c : x) c = (2.0 * uniform01(rng) - 1.0) * scale;
        const double t = dot(target, x);
        if (min_margin > 0.0 && std::fabs(t) <= min_margin) continue;
        int y = t >= 0.0 ? 1 : -1;
        if (min_margin <= 0.0 && uniform01(rng) < noise) y = -y;
        s.points.push_back({std::move(x), y});
    }
    s.weights.assign(n, Rational(1, static_cast<std::int64_t>(n)));
    return s;
}

TrialRecord make_record(std::size_t trial, std::uint64_t seed, std::size_t n, double emp, double pop, double bench) {
    return TrialRecord{trial, seed, n, emp, pop, bench, pop - bench, {}};
}

/// Runs rounds of `trials` trials at n, doubling n until `good` accepts the
/// round or n would exceed the cap. Trial indices continue across rounds.
template <class Trial, class Good>
void adaptive_rounds(std::vector<TrialRecord>& out, std::size_t n, std::size_t cap, std::size_t trials, std::size_t jobs,
                     std::map<std::string, double> tags, Trial&& trial, Good&& good) {
    for (std::size_t round = 0;; ++round) {
        std::vector<TrialRecord> batch(trials);
        const std::size_t base = out.size();
        parallel_for(trials, jobs, [&](std::size_t t) { batch[t] = trial(base + t, n); });
        for (auto& r : batch) {
            r.extra.insert(tags.begin(), tags.end());
            r.extra["round"] = static_cast<double>(round);
        }
        const bool accepted = good(batch);
        out.insert(out.end(), batch.begin(), batch.end());
        if (accepted || n > cap / 2) return;
        n *= 2;
    }
}

double pass_fraction(const std::vector<TrialRecord>& rs, double epsilon) {
    if (rs.empty()) return 0.0;
    const auto ok = std::count_if(rs.begin(), rs.end(), [&](const TrialRecord& r) { return r.excess <= epsilon; });
    return static_cast<double>(ok) / static_cast<double>(rs.size());
}

// --------------------------------------------------------------- kinds

void run_uc(const ExperimentConfig& c, std::size_t jobs, ExperimentReport& rep) {
    const LossSpec spec = LossSpec::parse(*c.loss);
    Rng rng = make_rng(instance_seed(c, "instance"));
    const Vector target = random_unit(*c.dim, rng);
    const FiniteSupport support = linear_support(*c.support, *c.dim, target, *c.noise, 1.0, 0.0, rng);
    const Adversary adv = random_translations(c.atoms.front(), *c.dim, *c.radius, rng);
    const auto cls = HypothesisClass::halfspace_grid(*c.dim, *c.class_size, instance_seed(c, "class"));
    const LossTable table = make_table(spec, cls, adv, support, jobs);
    const double best = min_of(table.pop);

    const std::size_t trials = *c.trials;
    rep.records.resize(c.sizes.size() * trials);
    parallel_for(rep.records.size(), jobs, [&](std::size_t index) {
        const std::size_t n = c.sizes[index / trials];
        const std::uint64_t seed = trial_seed(c, index);
        Rng trng = make_rng(seed);
        const auto emp = table.sample_risks(sample_indices(support, n, trng));
        std::size_t worst = 0;
        double gap = -1.0;
        for (std::size_t j = 0; j < emp.size(); ++j) {
            const double g = std::fabs(table.pop[j] - emp[j]);
            if (g > gap) {
                gap = g;
                worst = j;
            }
        }
        TrialRecord r = make_record(index, seed, n, emp[worst], table.pop[worst], best);
        r.excess = gap;
        rep.records[index] = std::move(r);
    });
}

void run_sandwich(const ExperimentConfig& c, std::size_t jobs, ExperimentReport& rep) {
    rep.records.resize(*c.trials);
    parallel_for(*c.trials, jobs, [&](std::size_t index) {
        const std::uint64_t seed = trial_seed(c, index);
        Rng rng = make_rng(seed);
        const std::size_t k = 1 + rng() % 6;
        const auto shares = random_partition(60, k, rng);
        std::vector<Atom> atoms;
        Hypothesis h = Hypothesis::sine(0.0);
        LabeledExample ex;
        if (index % 2 == 0) {
            const std::size_t d = 1 + rng() % 3;
            Vector w(d), x(d);
            for (double& v : w) v = 2.0 * uniform01(rng) - 1.0;
            for (double& v : x) v = 2.0 * uniform01(rng) - 1.0;
            w[0] += w[0] >= 0.0 ? 0.01 : -0.01;
            for (std::size_t a = 0; a < k; ++a) {
                Vector delta(d);
                for (double& v : delta) v = (2.0 * uniform01(rng) - 1.0) * 0.5;
                atoms.push_back({Translation{std::move(delta)}, Rational(shares[a], 60)});
            }
            h = Hypothesis::halfspace(std::move(w));
            ex = {std::move(x), rng() % 2 ? 1 : -1};
        } else {
            std::vector<std::pair<PointId, int>> entries;
            for (PointId id = 1; id <= 8; ++id) entries.emplace_back(id, rng() % 2 ? 1 : -1);
            for (std::size_t a = 0; a < k; ++a) {
                atoms.push_back({ImageMap{{{0, 1 + rng() % 8}}}, Rational(shares[a], 60)});
            }
            h = Hypothesis::table(std::move(entries), rng() % 2 ? 1 : -1);
            ex = {PointId{0}, rng() % 2 ? 1 : -1};
        }
        const auto rho_num = 1 + static_cast<std::int64_t>(rng() % 59);
        const Rational rho(rho_num, 60);
        const Rational rho_star(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(rho_num)), 60);
        const Adversary adv = FiniteAtoms(std::move(atoms));
        const MarginStats stats = margin_stats(h, adv, ex, 0);
        const auto l = [&](const LossSpec& s) { return *exact_loss_from_margin(s, stats); };
        const Rational lo = l(LossSpec::rho_threshold(rho));
        const Rational ramp = l(LossSpec::ramp(rho, rho_star));
        const Rational hi = l(LossSpec::rho_threshold(rho_star));
        const Rational scaled = l(LossSpec::scaled_ramp(rho));
        const Rational worst = l(LossSpec::worst_case());
        const int violations = static_cast<int>(lo > ramp) + static_cast<int>(ramp > hi) +
                               static_cast<int>(lo > scaled) + static_cast<int>(scaled > worst);
        TrialRecord r{index, seed, 1, lo.to_double(), ramp.to_double(), hi.to_double(), double(violations), {}};
        r.extra["scaled"] = scaled.to_double();
        r.extra["worst"] = worst.to_double();
        r.extra["rho"] = rho.to_double();
        r.extra["rho_star"] = rho_star.to_double();
        rep.records[index] = std::move(r);
    });
}

void run_lowerbound(const ExperimentConfig& c, std::size_t jobs, ExperimentReport& rep) {
    const std::size_t m = *c.m;
    const auto inst = build_construction(3 * m, *c.rho, m);
    const LossMatrix losses = loss_matrix(LossSpec::rho_threshold(*c.rho), inst.cls, inst.adversary, inst.centers, 0,
                                          jobs, std::numeric_limits<std::size_t>::max());
    const std::size_t f = losses.functions;

    // Each hard distribution is uniform over 2m of the 3m centers.
    std::vector<std::vector<std::size_t>> supports(*c.distributions);
    std::vector<double> optimum(*c.distributions);
    for (std::size_t d = 0; d < supports.size(); ++d) {
        Rng rng = make_rng(instance_seed(c, "distribution", d));
        std::vector<std::size_t> centers(3 * m);
        std::iota(centers.begin(), centers.end(), 0);
        std::shuffle(centers.begin(), centers.end(), rng);
        centers.resize(2 * m);
        std::sort(centers.begin(), centers.end());
        supports[d] = centers;
        std::vector<double> risk(f, 0.0);
        for (const auto i : centers) simd::accumulate(risk, losses.row(i), 1.0 / static_cast<double>(2 * m));
        optimum[d] = min_of(risk);
    }

    rep.records.resize(*c.trials);
    parallel_for(*c.trials, jobs, [&](std::size_t index) {
        const std::size_t d = index % supports.size();
        const std::uint64_t seed = trial_seed(c, index);
        Rng rng = make_rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, 2 * m - 1);
        std::vector<double> emp(f, 0.0);
        for (std::size_t s = 0; s < m; ++s) simd::accumulate(emp, losses.row(supports[d][pick(rng)]), 1.0);
        for (double& v : emp) v /= static_cast<double>(m);
        const std::size_t out = select_minimizer(emp, TieBreak::random, derive_seed(seed, 1));
        double pop = 0.0;
        for (const auto i : supports[d]) pop += losses.at(i, out);
        pop /= static_cast<double>(2 * m);
        TrialRecord r = make_record(index, seed, m, emp[out], pop, optimum[d]);
        r.extra["distribution"] = static_cast<double>(d);
        rep.records[index] = std::move(r);
    });
}

/// One relaxed-competition instance: tables for the learner's loss, the
/// evaluation loss R^rho and the benchmark (same as the learner's loss).
struct CompetitionInstance {
    FiniteSupport support;
    LossTable learner;
    LossTable target;
};

CompetitionInstance random_atoms_instance(const ExperimentConfig& c, const LossSpec& learner_loss, Rng& rng) {
    const std::size_t n = *c.support;
    const std::size_t k = c.atoms.front();
    const auto atom_shares = random_partition(static_cast<std::int64_t>(4 * k), k, rng);
    std::vector<Atom> atoms;
    for (std::size_t a = 0; a < k; ++a) {
        ImageMap g;
        for (PointId x = 0; x < n; ++x) {
            if (a > 0 && uniform01(rng) < 0.5) g.pairs.emplace_back(x, rng() % n);
        }
        atoms.push_back({std::move(g), Rational(atom_shares[a], static_cast<std::int64_t>(4 * k))});
    }
    const Adversary adv = FiniteAtoms(std::move(atoms));
    std::vector<int> truth(n);
    for (auto& y : truth) y = uniform01(rng) < 0.5 ? 1 : -1;
    std::vector<Hypothesis> members;
    for (std::size_t j = 0; j < *c.class_size; ++j) {
        std::vector<std::pair<PointId, int>> entries;
        for (PointId x = 0; x < n; ++x) entries.emplace_back(x, uniform01(rng) < 0.8 ? truth[x] : -truth[x]);
        members.push_back(Hypothesis::table(std::move(entries), 1));
    }
    const auto cls = HypothesisClass::explicit_list(std::move(members));
    FiniteSupport support;
    const auto weight_shares = random_partition(static_cast<std::int64_t>(4 * n), n, rng);
    for (PointId x = 0; x < n; ++x) {
        support.points.push_back({x, truth[x]});
        support.weights.emplace_back(weight_shares[x], static_cast<std::int64_t>(4 * n));
    }
    return {support, make_table(learner_loss, cls, adv, support, 1),
            make_table(LossSpec::rho_threshold(*c.rho), cls, adv, support, 1)};
}

void run_relaxed(const ExperimentConfig& c, std::size_t jobs, ExperimentReport& rep) {
    const bool prerm_rule = *c.rule == "prerm";
    const LossSpec learner_loss = prerm_rule ? LossSpec::rho_threshold(*c.rho_star) : LossSpec::worst_case();
    const double log_term = std::log(1.0 / *c.delta);

    if (*c.scenario == "hard_family") {
        const std::size_t m = *c.m;
        const auto inst = build_construction(3 * m, prerm_rule ? *c.rho_star : *c.rho, m);
        FiniteSupport all;
        all.points = inst.centers;
        all.weights.assign(all.points.size(), Rational(1, static_cast<std::int64_t>(all.points.size())));
        const LossTable learner = make_table(learner_loss, inst.cls, inst.adversary, all, jobs);
        const LossTable target = make_table(LossSpec::rho_threshold(*c.rho), inst.cls, inst.adversary, all, jobs);
        const std::size_t n0 = bound_n(std::log(static_cast<double>(inst.cls.size())) + log_term, *c.epsilon);
        const auto trial = [&](std::size_t index, std::size_t n) {
            const std::uint64_t seed = trial_seed(c, index);
            Rng rng = make_rng(seed);
            std::vector<std::size_t> centers(3 * m);
            std::iota(centers.begin(), centers.end(), 0);
            std::shuffle(centers.begin(), centers.end(), rng);
            centers.resize(2 * m);
            std::uniform_int_distribution<std::size_t> pick(0, 2 * m - 1);
            std::vector<std::size_t> sample(n);
            for (auto& s : sample) s = centers[pick(rng)];
            const auto emp = learner.sample_risks(sample);
            const std::size_t out = argmin_lowest(emp);
            const auto risk = [&](const LossTable& t, std::size_t j) {
                double v = 0.0;
                for (const auto i : centers) v += t.values[i * t.cols + j];
                return v / static_cast<double>(2 * m);
            };
            double bench = INFINITY, same = INFINITY;
            for (std::size_t j = 0; j < learner.cols; ++j) {
                bench = std::min(bench, risk(learner, j));
                same = std::min(same, risk(target, j));
            }
            TrialRecord r = make_record(index, seed, n, emp[out], risk(target, out), bench);
            r.extra["same_rho_optimum"] = same;
            return r;
        };
        adaptive_rounds(rep.records, n0, *c.n_cap, *c.trials, jobs, {}, trial, [&](const auto& batch) {
            return pass_fraction(batch, *c.epsilon) >= 1.0 - *c.delta;
        });
        return;
    }

    const std::size_t n0 = bound_n(std::log(static_cast<double>(*c.class_size)) + log_term, *c.epsilon);
    const auto trial = [&](std::size_t index, std::size_t n) {
        const std::uint64_t seed = trial_seed(c, index);
        Rng rng = make_rng(seed);
        const CompetitionInstance inst = random_atoms_instance(c, learner_loss, rng);
        const auto emp = inst.learner.sample_risks(sample_indices(inst.support, n, rng));
        const std::size_t out = argmin_lowest(emp);
        TrialRecord r = make_record(index, seed, n, emp[out], inst.target.pop[out], min_of(inst.learner.pop));
        r.extra["same_rho_optimum"] = min_of(inst.target.pop);
        return r;
    };
    adaptive_rounds(rep.records, n0, *c.n_cap, *c.trials, jobs, {}, trial, [&](const auto& batch) {
        return pass_fraction(batch, *c.epsilon) >= 1.0 - *c.delta;
    });
}

/// Translation grids of the tolerant experiment: spacing r / 2 inside l_2
/// balls of the given radius.
FiniteAtoms tolerant_grid(const ExperimentConfig& c, double radius) {
    return discretize(LpBall{2.0, radius, 1, 0}, *c.dim, *c.r / 2.0);
}

void run_tolerant(const ExperimentConfig& c, std::size_t jobs, ExperimentReport& rep) {
    const double r = *c.r;
    const auto cls = HypothesisClass::halfspace_grid(*c.dim, *c.class_size, instance_seed(c, "class"));
    const Vector target = std::get<Halfspace>(cls.member(0).variant()).w;
    const Adversary big = tolerant_grid(c, 3.0 * r);
    const Adversary small = tolerant_grid(c, r);
    const std::size_t n0 = bound_n(std::log(static_cast<double>(cls.size())) + std::log(1.0 / *c.delta), *c.epsilon);

    for (int phase = 0; phase < 2; ++phase) {
        Rng rng = make_rng(instance_seed(c, phase == 0 ? "separable" : "noisy"));
        // Separable: every point keeps l_2 margin above 3r + r/2 from the
        // target member, so that member is robust to all of G.
        const FiniteSupport support =
            phase == 0 ? linear_support(*c.support, *c.dim, target, 0.0, 2.0, 3.5 * r, rng)
                       : linear_support(*c.support, *c.dim, target, *c.noise, 2.0, 0.0, rng);
        const LossTable on_g = make_table(LossSpec::worst_case(), cls, big, support, jobs);
        const LossTable on_g_prime = make_table(LossSpec::worst_case(), cls, small, support, jobs);
        const double bench = min_of(on_g.pop);
        const auto trial = [&](std::size_t index, std::size_t n) {
            const std::uint64_t seed = trial_seed(c, index);
            Rng trng = make_rng(seed);
            const auto emp = on_g.sample_risks(sample_indices(support, n, trng));
            const std::size_t out = argmin_lowest(emp);
            return make_record(index, seed, n, emp[out], on_g_prime.pop[out], bench);
        };
        if (phase == 0) {
            adaptive_rounds(rep.records, n0, *c.n_cap, *c.trials, jobs, {{"phase", 0.0}}, trial, [](const auto& batch) {
                return std::all_of(batch.begin(), batch.end(), [](const TrialRecord& t) { return t.pop_risk == 0.0; });
            });
        } else {
            adaptive_rounds(rep.records, n0, *c.n_cap, *c.trials, jobs, {{"phase", 1.0}}, trial, [&](const auto& batch) {
                return pass_fraction(batch, *c.epsilon) >= 1.0 - *c.delta;
            });
        }
    }
}

void run_finite_g(const ExperimentConfig& c, std::size_t jobs, ExperimentReport& rep) {
    Rng rng = make_rng(instance_seed(c, "instance"));
    const Vector target = random_unit(*c.dim, rng);
    const FiniteSupport support = linear_support(*c.support, *c.dim, target, *c.noise, 1.0, 0.0, rng);
    const auto cls = HypothesisClass::halfspace_grid(*c.dim, *c.class_size, instance_seed(c, "class"));
    const LossSpec spec = LossSpec::rho_threshold(*c.rho);
    const std::size_t gap_n = c.sizes.front();
    // Homogeneous halfspaces in R^d have VC dimension d.
    const double vc = static_cast<double>(*c.dim);

    for (const std::size_t k : c.atoms) {
        Rng arng = make_rng(instance_seed(c, "atoms", k));
        const Adversary adv = random_translations(k, *c.dim, *c.radius, arng);
        const LossTable table = make_table(spec, cls, adv, support, jobs);
        const double bench = min_of(table.pop);
        const std::size_t n0 =
            bound_n(vc * std::log(static_cast<double>(k)) + std::log(1.0 / *c.delta), *c.epsilon);
        const auto trial = [&](std::size_t index, std::size_t n) {
            const std::uint64_t seed = trial_seed(c, index);
            Rng trng = make_rng(seed);
            const auto emp = table.sample_risks(sample_indices(support, n, trng));
            const std::size_t out = argmin_lowest(emp);
            TrialRecord r = make_record(index, seed, n, emp[out], table.pop[out], bench);
            const auto fixed = table.sample_risks(sample_indices(support, gap_n, trng));
            double gap = 0.0;
            for (std::size_t j = 0; j < fixed.size(); ++j) gap = std::max(gap, std::fabs(table.pop[j] - fixed[j]));
            r.extra["gap"] = gap;
            return r;
        };
        adaptive_rounds(rep.records, std::max<std::size_t>(n0, 1), *c.n_cap, *c.trials, jobs,
                        {{"atoms", static_cast<double>(k)}}, trial,
                        [&](const auto& batch) { return pass_fraction(batch, *c.epsilon) >= 1.0 - *c.delta; });
    }
}

struct SineInstance {
    FiniteSupport support;
    HypothesisClass cls;
};

SineInstance sine_instance(const ExperimentConfig& c) {
    std::vector<double> omegas(*c.class_size);
    for (std::size_t k = 0; k < omegas.size(); ++k) omegas[k] = 0.5 * static_cast<double>(k);
    const std::size_t n = *c.support;
    const auto negatives = static_cast<std::size_t>(std::llround(*c.noise * static_cast<double>(n)));
    std::vector<int> labels(n, 1);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(std::min(negatives, n)), -1);
    Rng rng = make_rng(instance_seed(c, "instance"));
    std::shuffle(labels.begin(), labels.end(), rng);
    FiniteSupport support;
    for (std::size_t i = 0; i < n; ++i) {
        // Midpoints of n equal cells of [-1, 1]; x = 0 only when n is odd.
        double x = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        if (x == 0.0) x = 0.5 / static_cast<double>(n);
        support.points.push_back({Vector{x}, labels[i]});
    }
    support.weights.assign(n, Rational(1, static_cast<std::int64_t>(n)));
    return {std::move(support), HypothesisClass::sine_grid(std::move(omegas))};
}

void run_sine(const ExperimentConfig& c, std::size_t jobs, ExperimentReport& rep) {
    const SineInstance inst = sine_instance(c);
    const LossSpec spec = LossSpec::parse(*c.loss);
    const LossTable table = make_table(spec, inst.cls, UniformScaling{}, inst.support, jobs);
    const double bench = min_of(table.pop);
    const std::size_t n0 = bound_n(std::log(static_cast<double>(inst.cls.size())) + std::log(1.0 / *c.delta),
                                   *c.epsilon);
    const auto trial = [&](std::size_t index, std::size_t n) {
        const std::uint64_t seed = trial_seed(c, index);
        Rng rng = make_rng(seed);
        const auto emp = table.sample_risks(sample_indices(inst.support, n, rng));
        const std::size_t out = argmin_lowest(emp);
        return make_record(index, seed, n, emp[out], table.pop[out], bench);
    };
    adaptive_rounds(rep.records, n0, *c.n_cap, *c.trials, jobs, {}, trial, [&](const auto& batch) {
        return pass_fraction(batch, *c.epsilon) == 1.0;
    });
}

// ------------------------------------------------------------ aggregation

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Nearest-rank quantile.
double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

Json summary(const std::vector<TrialRecord>& rs, std::optional<double> epsilon) {
    std::vector<double> excess, pop;
    for (const auto& r : rs) {
        excess.push_back(r.excess);
        pop.push_back(r.pop_risk);
    }
    Json j{{"trials", rs.size()},
           {"mean_excess", mean(excess)},
           {"median_excess", median(excess)},
           {"q10_excess", quantile(excess, 0.1)},
           {"q90_excess", quantile(excess, 0.9)},
           {"mean_pop_risk", mean(pop)}};
    if (epsilon) j["pass_fraction"] = pass_fraction(rs, *epsilon);
    return j;
}

double extra_of(const TrialRecord& r, const char* key) {
    const auto it = r.extra.find(key);
    if (it == r.extra.end()) throw ValidationError(std::string("trial record lacks '") + key + "'");
    return it->second;
}

/// Records of the last doubling round among those matching `keep`.
template <class Keep>
std::vector<TrialRecord> final_round(const std::vector<TrialRecord>& all, Keep&& keep) {
    double last = -1.0;
    for (const auto& r : all) {
        if (keep(r)) last = std::max(last, extra_of(r, "round"));
    }
    std::vector<TrialRecord> out;
    for (const auto& r : all) {
        if (keep(r) && extra_of(r, "round") == last) out.push_back(r);
    }
    return out;
}

Check make_check(std::string name, std::string bound, double value, std::string cmp, double threshold) {
    bool pass = false;
    if (cmp == "<=") pass = value <= threshold;
    else if (cmp == ">=") pass = value >= threshold;
    else if (cmp == "<") pass = value < threshold;
    else if (cmp == ">") pass = value > threshold;
    else pass = value == threshold;
    return Check{std::move(name), std::move(bound), value, std::move(cmp), threshold, pass};
}

const char* const constants_note =
    "sample sizes follow the bound shape with every constant set to 1 and are doubled until the property "
    "holds or n_cap is reached; this says nothing about the true constants";

}  // namespace

void aggregate(ExperimentReport& rep) {
    const ExperimentConfig& c = rep.config;
    auto& rs = rep.records;
    rep.checks.clear();
    rep.notes.clear();
    rep.aggregates = Json::object();
    const auto all = [](const TrialRecord&) { return true; };

    switch (c.kind) {
        case ExperimentKind::uc: {
            Json per_n = Json::array();
            std::vector<double> medians, scaled;
            for (const auto n : c.sizes) {
                std::vector<TrialRecord> group;
                for (const auto& r : rs) {
                    if (r.n == n) group.push_back(r);
                }
                Json s = summary(group, std::nullopt);
                std::vector<double> gaps;
                for (const auto& r : group) gaps.push_back(r.excess);
                const double med = median(gaps);
                s["n"] = n;
                s["median_gap"] = med;
                s["median_gap_sqrt_n"] = med * std::sqrt(static_cast<double>(n));
                medians.push_back(med);
                scaled.push_back(med * std::sqrt(static_cast<double>(n)));
                per_n.push_back(std::move(s));
            }
            rep.aggregates["per_n"] = per_n;
            if (c.sizes.size() >= 2) {
                rep.checks.push_back(make_check("gap_decreases", "median sup-gap at the largest n below the smallest n",
                                                medians.back(), "<", medians.front()));
                const double hi = *std::max_element(scaled.begin(), scaled.end());
                const double lo = *std::min_element(scaled.begin(), scaled.end());
                rep.checks.push_back(make_check("sqrt_n_envelope",
                                                "max/min of median gap * sqrt(n) across sizes (C/sqrt(n) shape)",
                                                lo > 0.0 ? hi / lo : INFINITY, "<=", 3.0));
            }
            break;
        }
        case ExperimentKind::sandwich: {
            double violations = 0.0;
            for (const auto& r : rs) violations += r.excess;
            rep.aggregates["triples"] = rs.size();
            rep.aggregates["violations"] = violations;
            rep.checks.push_back(make_check(
                "sandwich_violations", "l^rho <= ramp <= l^rho* and l^rho <= scaled ramp <= l_G, exact", violations,
                "==", 0.0));
            break;
        }
        case ExperimentKind::lowerbound: {
            std::vector<double> pop;
            std::map<std::size_t, std::vector<double>> by_dist;
            double worst_optimum = 0.0;
            for (const auto& r : rs) {
                pop.push_back(r.pop_risk);
                by_dist[static_cast<std::size_t>(extra_of(r, "distribution"))].push_back(r.pop_risk);
                worst_optimum = std::max(worst_optimum, r.benchmark);
            }
            std::size_t worst = 0;
            double worst_mean = -1.0;
            Json per = Json::array();
            for (const auto& [d, risks] : by_dist) {
                const double mu = mean(risks);
                per.push_back(Json{{"distribution", d}, {"samples", risks.size()}, {"mean_risk", mu}});
                if (mu > worst_mean) {
                    worst_mean = mu;
                    worst = d;
                }
            }
            const auto& wr = by_dist[worst];
            const double freq =
                static_cast<double>(std::count_if(wr.begin(), wr.end(), [](double v) { return v > 0.125; })) /
                static_cast<double>(wr.size());
            rep.aggregates["per_distribution"] = per;
            rep.aggregates["mean_risk"] = mean(pop);
            rep.aggregates["worst_distribution"] = worst;
            rep.aggregates["worst_frequency_above_one_eighth"] = freq;
            rep.checks.push_back(make_check("mean_risk", "mean population rho-risk of random-tie PRERM >= 1/4 - 0.05",
                                            mean(pop), ">=", 0.25 - 0.05));
            rep.checks.push_back(make_check("realizable", "every sampled distribution has a member with zero risk",
                                            worst_optimum, "==", 0.0));
            rep.checks.push_back(make_check("worst_distribution_frequency",
                                            "P(risk > 1/8) on the worst sampled distribution >= 1/7 - 0.05", freq,
                                            ">=", 1.0 / 7.0 - 0.05));
            break;
        }
        case ExperimentKind::relaxed_competition: {
            const auto last = final_round(rs, all);
            double below = 0.0;
            for (const auto& r : rs) {
                if (r.pop_risk < extra_of(r, "same_rho_optimum") - 1e-12) below += 1.0;
            }
            Json s = summary(last, c.epsilon);
            s["n"] = last.empty() ? 0 : last.front().n;
            rep.aggregates["final_round"] = s;
            rep.aggregates["rounds"] = last.empty() ? 0.0 : extra_of(last.front(), "round") + 1.0;
            rep.checks.push_back(make_check("pass_fraction",
                                            *c.rule == "prerm" ? "P(R^rho(out) - inf R^rho* <= eps) >= 1 - delta"
                                                               : "P(R^rho(out) - inf R_G <= eps) >= 1 - delta",
                                            pass_fraction(last, *c.epsilon), ">=", 1.0 - *c.delta));
            rep.checks.push_back(make_check("same_rho_sandwich", "R^rho(out) >= inf R^rho in every trial", below, "==", 0.0));
            rep.notes.emplace_back(constants_note);
            break;
        }
        case ExperimentKind::tolerant: {
            const auto sep = final_round(rs, [](const TrialRecord& r) { return extra_of(r, "phase") == 0.0; });
            const auto noisy = final_round(rs, [](const TrialRecord& r) { return extra_of(r, "phase") == 1.0; });
            double worst = 0.0;
            for (const auto& r : sep) worst = std::max(worst, r.pop_risk);
            rep.aggregates["separable"] = summary(sep, c.epsilon);
            rep.aggregates["noisy"] = summary(noisy, c.epsilon);
            const FiniteAtoms twice = tolerant_grid(c, 2.0 * *c.r);
            MetricSpaceSample grid{{}, 2.0};
            for (const auto& a : twice.atoms()) grid.elements.push_back(std::get<Translation>(a.g).delta);
            rep.aggregates["cover_2r_grid"] = Json{{"elements", grid.elements.size()},
                                                   {"radius", *c.r},
                                                   {"greedy_cover", covering_number_greedy(grid, *c.r).size}};
            rep.aggregates["g_atoms"] = tolerant_grid(c, 3.0 * *c.r).size();
            rep.aggregates["g_prime_atoms"] = tolerant_grid(c, *c.r).size();
            rep.checks.push_back(
                make_check("separable_zero_risk", "R_G'(out) = 0 in every separable trial", worst, "==", 0.0));
            rep.checks.push_back(make_check("noisy_pass_fraction", "P(R_G'(out) - inf R_G <= eps) >= 1 - delta",
                                            pass_fraction(noisy, *c.epsilon), ">=", 1.0 - *c.delta));
            rep.notes.emplace_back(constants_note);
            break;
        }
        case ExperimentKind::finite_g: {
            Json per = Json::array();
            std::vector<double> median_gaps;
            for (const auto k : c.atoms) {
                const auto last = final_round(rs, [&](const TrialRecord& r) { return extra_of(r, "atoms") == double(k); });
                std::vector<double> gaps;
                for (const auto& r : last) gaps.push_back(extra_of(r, "gap"));
                Json s = summary(last, c.epsilon);
                s["atoms"] = k;
                s["n"] = last.empty() ? 0 : last.front().n;
                s["median_gap"] = median(gaps);
                per.push_back(s);
                median_gaps.push_back(median(gaps));
                rep.checks.push_back(make_check("pass_fraction_k" + std::to_string(k),
                                                "P(excess <= eps) >= 1 - delta with K = " + std::to_string(k),
                                                pass_fraction(last, *c.epsilon), ">=", 1.0 - *c.delta));
            }
            rep.aggregates["per_k"] = per;
            const auto [lo_it, hi_it] = std::minmax_element(c.atoms.begin(), c.atoms.end());
            if (*lo_it >= 2 && *hi_it > *lo_it) {
                const auto lo = static_cast<std::size_t>(lo_it - c.atoms.begin());
                const auto hi = static_cast<std::size_t>(hi_it - c.atoms.begin());
                const double ratio = median_gaps[lo] > 0.0 ? median_gaps[hi] / median_gaps[lo] : INFINITY;
                rep.checks.push_back(make_check(
                    "gap_ratio", "median gap(K max) / median gap(K min) <= 3 ln(K max) / ln(K min)", ratio, "<=",
                    3.0 * std::log(double(*hi_it)) / std::log(double(*lo_it))));
            }
            rep.notes.emplace_back(constants_note);
            break;
        }
        case ExperimentKind::sine: {
            const auto last = final_round(rs, all);
            double worst = 0.0;
            for (const auto& r : last) worst = std::max(worst, r.excess);
            const SineInstance inst = sine_instance(c);
            const LossTable table = make_table(LossSpec::parse(*c.loss), inst.cls, UniformScaling{}, inst.support, 1);
            std::set<std::vector<double>> behaviors;
            for (std::size_t j = 0; j < table.cols; ++j) {
                std::vector<double> col;
                for (std::size_t i = 0; i < table.rows; ++i) col.push_back(table.values[i * table.cols + j]);
                behaviors.insert(std::move(col));
            }
            rep.aggregates["final_round"] = summary(last, c.epsilon);
            rep.aggregates["distinct_smoothed_behaviors"] = behaviors.size();
            rep.checks.push_back(make_check("max_excess", "excess <= eps in every trial", worst, "<=", *c.epsilon));
            rep.notes.emplace_back(constants_note);
            break;
        }
    }
    if (rs.empty()) rep.checks.push_back(make_check("records", "at least one trial", 0.0, ">=", 1.0));
    rep.verdict = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Check& ch) { return ch.pass; });
}

ExperimentReport run_experiment(const ExperimentConfig& raw, std::size_t jobs) {
    ExperimentReport rep;
    rep.config = with_defaults(raw);
    const ExperimentConfig& c = rep.config;
    switch (c.kind) {
        case ExperimentKind::uc: run_uc(c, jobs, rep); break;
        case ExperimentKind::sandwich: run_sandwich(c, jobs, rep); break;
        case ExperimentKind::relaxed_competition: run_relaxed(c, jobs, rep); break;
        case ExperimentKind::tolerant: run_tolerant(c, jobs, rep); break;
        case ExperimentKind::lowerbound: run_lowerbound(c, jobs, rep); break;
        case ExperimentKind::sine: run_sine(c, jobs, rep); break;
        case ExperimentKind::finite_g: run_finite_g(c, jobs, rep); break;
    }
    aggregate(rep);
    return rep;
}

// ----------------------------------------------------------- persistence

Json to_json(const ExperimentReport& rep) {
    Json records = Json::array();
    for (const auto& r : rep.records) {
        Json j{{"trial", r.trial},       {"seed", r.seed},           {"n", r.n},
               {"emp_risk", r.emp_risk}, {"pop_risk", r.pop_risk},   {"benchmark", r.benchmark},
               {"excess", r.excess}};
        if (!r.extra.empty()) j["extra"] = r.extra;
        records.push_back(std::move(j));
    }
    Json checks = Json::array();
    for (const auto& ch : rep.checks) {
        checks.push_back(Json{{"name", ch.name},
                              {"bound", ch.bound},
                              {"value", ch.value},
                              {"comparison", ch.comparison},
                              {"threshold", ch.threshold},
                              {"pass", ch.pass}});
    }
    return Json{{"config", to_json(rep.config)},
                {"records", records},
                {"aggregates", rep.aggregates},
                {"checks", checks},
                {"verdict", rep.verdict ? "pass" : "fail"},
                {"notes", rep.notes}};
}

ExperimentReport report_from_json(const Json& j) {
    try {
        ExperimentReport rep;
        rep.config = with_defaults(parse_config(j.at("config").dump()));
        for (const auto& r : j.at("records")) {
            TrialRecord t;
            t.trial = r.at("trial").get<std::size_t>();
            t.seed = r.at("seed").get<std::uint64_t>();
            t.n = r.at("n").get<std::size_t>();
            t.emp_risk = r.at("emp_risk").get<double>();
            t.pop_risk = r.at("pop_risk").get<double>();
            t.benchmark = r.at("benchmark").get<double>();
            t.excess = r.at("excess").get<double>();
            if (r.contains("extra")) t.extra = r.at("extra").get<std::map<std::string, double>>();
            rep.records.push_back(std::move(t));
        }
        aggregate(rep);
        return rep;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
}

std::string trials_csv(const std::vector<TrialRecord>& records) {
    std::string out = "trial,seed,n,emp_risk,pop_risk,benchmark,excess\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%zu,%llu,%zu,%.17g,%.17g,%.17g,%.17g\n", r.trial,
                      static_cast<unsigned long long>(r.seed), r.n, r.emp_risk, r.pop_risk, r.benchmark, r.excess);
        out += buf;
    }
    return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    io::write_json(dir / "report.json", to_json(report));
    std::ofstream csv(dir / "trials.csv", std::ios::binary);
    if (!csv) throw ValidationError("cannot write '" + (dir / "trials.csv").string() + "'");
    csv << trials_csv(report.records);
}

}  // namespace probrobust
