#include "cli.hpp"

#include "probrobust/complexity.hpp"
#include "probrobust/constructions.hpp"
#include "probrobust/errors.hpp"
#include "probrobust/experiments.hpp"
#include "probrobust/learners.hpp"
#include "probrobust/losses.hpp"
#include "probrobust/parallel.hpp"
#include "probrobust/serialization.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace probrobust::cli {

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

const char* const loss_grammar = "worst|rho:R|ramp:R,R*|hinge|squared|exp|avg|scaled:R (R as p/q or exact decimal)";

/// Shared result sink: optionally write JSON to --out, then print the line.
struct Output {
    std::string path;

    void emit(std::ostream& out, const std::string& summary, const Json& result) const {
        out << summary << '\n';
        if (!path.empty()) {
            io::write_json(path, result);
            out << "report: " << path << '\n';
        }
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

Dataset load_dataset(const std::string& path) { return io::dataset_from_json(io::read_json(path)); }
Adversary load_adversary(const std::string& path) { return io::adversary_from_json(io::read_json(path)); }
HypothesisClass load_class(const std::string& path) { return io::class_from_json(io::read_json(path)); }

std::size_t budget_or_default(std::size_t flag) { return flag == 0 ? default_budget() : flag; }

// ------------------------------------------------------------------ eval

struct EvalArgs {
    std::string loss, hyp, adv, data, dist;
    std::uint64_t seed = 0;
    Output output;
};

int do_eval(const EvalArgs& a, std::ostream& out) {
    const LossSpec spec = LossSpec::parse(a.loss);
    const Hypothesis h = io::hypothesis_from_json(io::read_json(a.hyp));
    const Adversary adv = load_adversary(a.adv);
    if (!a.data.empty()) {
        const Dataset data = load_dataset(a.data);
        const double risk = empirical_risk(spec, h, adv, data, a.seed);
        a.output.emit(out, "empirical risk: " + fmt(risk),
                      Json{{"loss", spec.to_string()}, {"examples", data.size()}, {"empirical_risk", risk}});
        return exit_ok;
    }
    const Distribution dist = io::distribution_from_json(io::read_json(a.dist));
    const double risk = population_risk(spec, h, adv, dist, a.seed);
    Json result{{"loss", spec.to_string()}, {"population_risk", risk}};
    std::string line = "population risk: " + fmt(risk);
    if (const auto* support = dist.support()) {
        if (const auto exact = exact_population_risk(spec, h, adv, *support, a.seed)) {
            result["exact"] = io::to_json(*exact);
            line += " (exact " + exact->to_string() + ")";
        }
    }
    a.output.emit(out, line, result);
    return exit_ok;
}

// ----------------------------------------------------------------- learn

struct LearnArgs {
    std::string rule = "erm", loss, rho, cls, data, adv, tie = "lowest";
    std::uint64_t seed = 0;
    std::size_t jobs = 0, budget = 0;
    Output output;
};

int do_learn(const LearnArgs& a, std::ostream& out) {
    const HypothesisClass cls = load_class(a.cls);
    const Adversary adv = load_adversary(a.adv);
    const Dataset data = load_dataset(a.data);
    ErmOptions opt;
    opt.tie = a.tie == "random" ? TieBreak::random : TieBreak::lowest_index;
    opt.tie_seed = derive_seed(a.seed, "tie", 0);
    opt.jobs = resolve_jobs(a.jobs);
    opt.budget = budget_or_default(a.budget);

    LossSpec spec = LossSpec::worst_case();
    if (a.rule == "erm") {
        if (a.loss.empty()) throw ValidationError("erm needs --loss");
        spec = LossSpec::parse(a.loss);
    } else if (a.rule == "prerm") {
        if (!a.rho.empty()) {
            spec = LossSpec::rho_threshold(Rational::parse(a.rho));
        } else if (!a.loss.empty()) {
            spec = LossSpec::parse(a.loss);
            if (!std::holds_alternative<RhoThresholdLoss>(spec.variant())) {
                throw ValidationError("prerm minimizes a rho-threshold loss; pass --rho or --loss rho:R");
            }
        } else {
            throw ValidationError("prerm needs --rho");
        }
    } else if (!a.loss.empty() && LossSpec::parse(a.loss).to_string() != "worst") {
        throw ValidationError("rerm minimizes the worst-case loss; drop --loss");
    }
    const ErmResult r = erm(spec, cls, adv, data, a.seed, opt);
    a.output.emit(out,
                  a.rule + ": member " + std::to_string(r.index) + " empirical risk " + fmt(r.empirical_risk) + " (" +
                      std::to_string(r.evaluations) + " evaluations)",
                  Json{{"rule", a.rule},
                       {"loss", spec.to_string()},
                       {"index", r.index},
                       {"hypothesis", io::to_json(r.hypothesis)},
                       {"empirical_risk", r.empirical_risk},
                       {"evaluations", r.evaluations}});
    return exit_ok;
}

// ------------------------------------------------------------ complexity

struct ComplexityArgs {
    std::string cls, domain, loss, adv, data, points;
    std::size_t cap = 0, draws = 0, jobs = 0, budget = 0;
    std::uint64_t seed = 0;
    double p = 2.0, r = 0.1;
    bool exact = false;
    std::size_t dim = 3, triples = 1000, trials = 64;
    Output output;
};

int do_vc(const ComplexityArgs& a, std::ostream& out) {
    const HypothesisClass cls = load_class(a.cls);
    VcResult vc;
    Json result;
    if (!a.loss.empty()) {
        if (a.adv.empty() || a.data.empty()) throw ValidationError("loss-class VC needs --adv and --data");
        const Dataset data = load_dataset(a.data);
        const std::size_t cap = a.cap == 0 ? data.size() : a.cap;
        vc = loss_class_vc(LossSpec::parse(a.loss), cls, load_adversary(a.adv), data, cap);
        result["points"] = data.size();
        result["loss"] = a.loss;
    } else {
        if (a.domain.empty()) throw ValidationError("vc needs --domain (or --loss with --adv and --data)");
        const auto domain = io::instances_from_json(io::read_json(a.domain));
        const std::size_t cap = a.cap == 0 ? domain.size() : a.cap;
        vc = vc_dimension(cls, domain, cap);
        result["points"] = domain.size();
    }
    result["vc_dimension"] = vc.dimension;
    result["witness"] = vc.witness;
    result["subsets_checked"] = vc.subsets_checked;
    a.output.emit(out, "vc dimension: " + std::to_string(vc.dimension), result);
    return exit_ok;
}

int do_rademacher(const ComplexityArgs& a, std::ostream& out) {
    const HypothesisClass cls = load_class(a.cls);
    const Dataset data = load_dataset(a.data);
    const LossMatrix m = loss_matrix(LossSpec::parse(a.loss.empty() ? "worst" : a.loss), cls, load_adversary(a.adv),
                                     data, a.seed, resolve_jobs(a.jobs), budget_or_default(a.budget));
    const auto est = empirical_rademacher(m, a.draws == 0 ? std::nullopt : std::optional(a.draws),
                                          derive_seed(a.seed, "rademacher", 0));
    const double massart = massart_bound(m.functions, m.examples);
    a.output.emit(out,
                  std::string("rademacher: ") + fmt(est.value) + (est.exact ? " (exact)" : " +- " + fmt(est.std_error)) +
                      ", massart bound " + fmt(massart),
                  Json{{"value", est.value},
                       {"std_error", est.std_error},
                       {"patterns", est.patterns},
                       {"exact", est.exact},
                       {"massart_bound", massart},
                       {"functions", m.functions},
                       {"examples", m.examples}});
    return exit_ok;
}

int do_cover(const ComplexityArgs& a, std::ostream& out) {
    MetricSpaceSample space;
    space.p = a.p;
    for (auto& x : io::instances_from_json(io::read_json(a.points))) {
        auto* v = std::get_if<Vector>(&x);
        if (v == nullptr) throw ValidationError("cover needs vector points");
        space.elements.push_back(std::move(*v));
    }
    const CoverResult c = a.exact ? covering_number_exact(space, a.r) : covering_number_greedy(space, a.r);
    a.output.emit(out, std::string(a.exact ? "exact" : "greedy") + " cover size: " + std::to_string(c.size),
                  Json{{"size", c.size}, {"centers", c.centers}, {"exact", a.exact}, {"r", a.r}});
    return exit_ok;
}

int do_rnice(const ComplexityArgs& a, std::ostream& out) {
    Rng rng = make_rng(derive_seed(a.seed, "rnice", 0));
    std::normal_distribution<double> normal;
    const auto draw = [&](double scale) {
        Vector v(a.dim);
        for (double& c : v) c = scale * normal(rng);
        return v;
    };
    std::vector<Vector> ws, xs, taus;
    for (std::size_t t = 0; t < a.triples; ++t) {
        ws.push_back(draw(1.0));
        xs.push_back(draw(1.0));
        // tau inside the closed r-ball: random direction, radius r * U.
        Vector tau = draw(1.0);
        const double norm = lp_norm(tau, a.p);
        const double radius = a.r * uniform01(rng);
        for (double& c : tau) c = norm > 0.0 ? c / norm * radius : 0.0;
        taus.push_back(std::move(tau));
    }
    const RNiceReport rep = r_nice_check(ws, xs, taus, a.p, a.r, a.trials, derive_seed(a.seed, "rnice", 1));
    Json result{{"triples", rep.triples},     {"excluded", rep.excluded}, {"passed", rep.passed},
                {"pass_fraction", rep.pass_fraction}, {"failures", rep.failures.size()}, {"note", rep.note}};
    std::string line = "r-nice pass fraction: " + fmt(rep.pass_fraction) + " (" + std::to_string(rep.excluded) +
                       " degenerate excluded)";
    if (!rep.note.empty()) line += "; " + rep.note;
    a.output.emit(out, line, result);
    return exit_ok;
}

// ------------------------------------------------------------- construct

struct ConstructArgs {
    std::size_t m = 0;
    std::string rho, family = "blowup", out;
    std::size_t weight = 0;
};

int do_construct(const ConstructArgs& a, std::ostream& out) {
    const Rational rho = Rational::parse(a.rho);
    const std::size_t centers = a.family == "hard" ? 3 * a.m : a.m;
    const std::optional<std::size_t> weight =
        a.weight != 0 ? std::optional(a.weight) : (a.family == "hard" ? std::optional(a.m) : std::nullopt);
    const auto inst = build_construction(centers, rho, weight);
    const fs::path dir(a.out);
    fs::create_directories(dir);
    io::write_json(dir / "adversary.json", io::to_json(inst.adversary));
    io::write_json(dir / "class.json", io::to_json(inst.cls));
    io::write_json(dir / "centers.json", io::to_json(inst.centers));
    io::write_json(dir / "points.json", io::to_json(inst.domain));
    out << a.family << " construction: " << centers << " centers, " << inst.cls.size() << " members, "
        << inst.domain.size() << " domain points\n"
        << "report: " << (dir / "class.json").string() << '\n';
    return exit_ok;
}

// --------------------------------------------------------------- convert

struct ConvertArgs {
    std::string sets, maps, out;
};

int do_convert(const ConvertArgs& a, std::ostream& out) {
    if (!a.sets.empty()) {
        const PerturbationSets u = io::sets_from_json(io::read_json(a.sets));
        const auto g = g_u_convert(u);
        std::vector<PointId> domain;
        for (const auto& [x, images] : u) domain.push_back(x);
        if (induced_sets(g, domain) != u) throw ValidationError("conversion failed to reproduce the perturbation sets");
        // Uniform weights make the maps a ready-to-use finite adversary.
        std::vector<Atom> atoms;
        for (const auto& map : g) atoms.push_back({map, Rational(1, static_cast<std::int64_t>(g.size()))});
        io::write_json(a.out, io::to_json(Adversary(FiniteAtoms(std::move(atoms)))));
        out << "converted " << u.size() << " perturbation sets into " << g.size() << " maps\n"
            << "report: " << a.out << '\n';
        return exit_ok;
    }
    const Adversary adv = load_adversary(a.maps);
    const auto* atoms = std::get_if<FiniteAtoms>(&adv.variant());
    if (atoms == nullptr) throw ValidationError("--maps needs a finite_atoms adversary of image maps");
    std::vector<ImageMap> g;
    std::set<PointId> domain_set;
    for (const auto& atom : atoms->atoms()) {
        const auto* map = std::get_if<ImageMap>(&atom.g);
        if (map == nullptr) throw ValidationError("--maps needs image-map atoms");
        for (const auto& [from, to] : map->pairs) domain_set.insert(from);
        g.push_back(*map);
    }
    const PerturbationSets u = induced_sets(g, std::vector<PointId>(domain_set.begin(), domain_set.end()));
    io::write_json(a.out, io::to_json(u));
    out << "converted " << g.size() << " maps into " << u.size() << " perturbation sets\n"
        << "report: " << a.out << '\n';
    return exit_ok;
}

// ------------------------------------------------------------ experiment

struct ExperimentArgs {
    std::string kind, config, out;
    std::size_t jobs = 0;
    std::map<std::string, std::string> overrides;
};

int do_experiment(const ExperimentArgs& a, std::ostream& out) {
    const ExperimentKind kind = parse_experiment_kind(a.kind);
    ExperimentConfig cfg;
    if (!a.config.empty()) {
        cfg = load_config(a.config);
        if (cfg.kind != kind) {
            throw ValidationError(std::string("config is for experiment ") + experiment_name(cfg.kind) + ", not " +
                                  experiment_name(kind));
        }
    }
    cfg.kind = kind;
    for (const auto& [key, value] : a.overrides) set_config_value(cfg, key, value);
    if (!cfg.seed) throw ValidationError("experiment needs --seed (or seed in the config)");
    const ExperimentReport rep = run_experiment(cfg, resolve_jobs(a.jobs));
    const fs::path dir = a.out.empty() ? fs::path("probrobust-out") / experiment_name(kind) : fs::path(a.out);
    write_report(rep, dir);
    const auto passed = std::count_if(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.pass; });
    out << experiment_name(kind) << ": " << (rep.verdict ? "PASS" : "FAIL") << " (" << passed << "/"
        << rep.checks.size() << " checks, " << rep.records.size() << " trials)";
    for (const auto& c : rep.checks) {
        if (!c.pass) out << "; failed " << c.name << " " << fmt(c.value) << " " << c.comparison << " " << fmt(c.threshold);
    }
    out << "\nreport: " << (dir / "report.json").string() << '\n';
    return rep.verdict ? exit_ok : exit_verdict_fail;
}

/// Adds a --seed that the subcommand cannot run without.
void add_seed(CLI::App* app, std::uint64_t& seed) {
    app->add_option("--seed", seed, "master seed (required; no implicit default)")->required();
}

void add_jobs(CLI::App* app, std::size_t& jobs) {
    app->add_option("--jobs", jobs, "worker threads, 0 = all cores (results do not depend on it)")
        ->capture_default_str();
}

void add_budget(CLI::App* app, std::size_t& budget) {
    app->add_option("--budget", budget,
                    "max class size x examples, 0 = PROBROBUST_BUDGET or 1000000");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistically robust PAC learning toolkit", "probrobust"};
    app.require_subcommand(1);
    app.fallthrough(false);
    std::function<int()> action;

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "risk of one hypothesis on a dataset or distribution");
    eval->add_option("--loss", ev.loss, loss_grammar)->required();
    eval->add_option("--hyp", ev.hyp, "hypothesis JSON")->required()->check(CLI::ExistingFile);
    eval->add_option("--adv", ev.adv, "adversary JSON")->required()->check(CLI::ExistingFile);
    auto* data_opt = eval->add_option("--data", ev.data, "dataset JSON (empirical risk)")->check(CLI::ExistingFile);
    auto* dist_opt = eval->add_option("--dist", ev.dist, "distribution JSON (population risk)")->check(CLI::ExistingFile);
    data_opt->excludes(dist_opt);
    eval->require_option(3, 6);
    add_seed(eval, ev.seed);
    eval->add_option("--out", ev.output.path, "write the result JSON here");
    eval->callback([&] {
        if (ev.data.empty() == ev.dist.empty()) throw CLI::ValidationError("eval", "give exactly one of --data, --dist");
        action = [&] { return do_eval(ev, out); };
    });

    LearnArgs ln;
    auto* learn = app.add_subcommand("learn", "proper ERM over a finite class");
    learn->add_option("--rule", ln.rule, "erm|rerm|prerm")->check(CLI::IsMember({"erm", "rerm", "prerm"}))->capture_default_str();
    learn->add_option("--loss", ln.loss, loss_grammar);
    learn->add_option("--rho", ln.rho, "prerm threshold, p/q or exact decimal");
    learn->add_option("--class", ln.cls, "class JSON")->required()->check(CLI::ExistingFile);
    learn->add_option("--data", ln.data, "dataset JSON")->required()->check(CLI::ExistingFile);
    learn->add_option("--adv", ln.adv, "adversary JSON")->required()->check(CLI::ExistingFile);
    learn->add_option("--tie", ln.tie, "lowest|random")->check(CLI::IsMember({"lowest", "random"}))->capture_default_str();
    add_seed(learn, ln.seed);
    add_jobs(learn, ln.jobs);
    add_budget(learn, ln.budget);
    learn->add_option("--out", ln.output.path, "write the result JSON here");
    learn->callback([&] { action = [&] { return do_learn(ln, out); }; });

    ComplexityArgs cx;
    auto* complexity = app.add_subcommand("complexity", "VC dimension, Rademacher complexity, covers, r-nice check");
    complexity->require_subcommand(1);
    auto* vc = complexity->add_subcommand("vc", "brute-force VC dimension of a class or its loss class");
    vc->add_option("--class", cx.cls, "class JSON")->required()->check(CLI::ExistingFile);
    vc->add_option("--domain", cx.domain, "points JSON (class VC)")->check(CLI::ExistingFile);
    vc->add_option("--loss", cx.loss, std::string("loss class VC instead: ") + loss_grammar);
    vc->add_option("--adv", cx.adv, "adversary JSON (loss class VC)")->check(CLI::ExistingFile);
    vc->add_option("--data", cx.data, "dataset JSON (loss class VC)")->check(CLI::ExistingFile);
    vc->add_option("--cap", cx.cap, "largest subset size tried, 0 = all points");
    vc->add_option("--out", cx.output.path, "write the result JSON here");
    vc->callback([&] { action = [&] { return do_vc(cx, out); }; });

    auto* rad = complexity->add_subcommand("rademacher", "empirical Rademacher complexity of a loss class");
    rad->add_option("--class", cx.cls, "class JSON")->required()->check(CLI::ExistingFile);
    rad->add_option("--adv", cx.adv, "adversary JSON")->required()->check(CLI::ExistingFile);
    rad->add_option("--data", cx.data, "dataset JSON")->required()->check(CLI::ExistingFile);
    rad->add_option("--loss", cx.loss, loss_grammar);
    rad->add_option("--draws", cx.draws, "Monte Carlo sign vectors, 0 = exact enumeration (n <= 12)");
    add_seed(rad, cx.seed);
    add_jobs(rad, cx.jobs);
    add_budget(rad, cx.budget);
    rad->add_option("--out", cx.output.path, "write the result JSON here");
    rad->callback([&] { action = [&] { return do_rademacher(cx, out); }; });

    auto* cover = complexity->add_subcommand("cover", "r-covering number of a point set under l_p");
    cover->add_option("--points", cx.points, "points JSON (vectors)")->required()->check(CLI::ExistingFile);
    cover->add_option("--p", cx.p, "norm exponent >= 1, inf allowed")->capture_default_str();
    cover->add_option("--r", cx.r, "cover radius")->required();
    cover->add_flag("--exact", cx.exact, "exact minimum (small inputs only) instead of greedy");
    cover->add_option("--out", cx.output.path, "write the result JSON here");
    cover->callback([&] { action = [&] { return do_cover(cx, out); }; });

    auto* rnice = complexity->add_subcommand("rnice", "r-nice check on random (w, x, tau) triples");
    rnice->add_option("--p", cx.p, "norm exponent >= 1, inf allowed")->capture_default_str();
    rnice->add_option("--r", cx.r, "ball radius")->capture_default_str();
    rnice->add_option("--dim", cx.dim, "dimension")->capture_default_str();
    rnice->add_option("--triples", cx.triples, "number of triples")->capture_default_str();
    rnice->add_option("--trials", cx.trials, "ball points sampled per triple")->capture_default_str();
    add_seed(rnice, cx.seed);
    rnice->add_option("--out", cx.output.path, "write the result JSON here");
    rnice->callback([&] { action = [&] { return do_rnice(cx, out); }; });

    ConstructArgs co;
    auto* construct = app.add_subcommand("construct", "write the blow-up construction or a hard-distribution family");
    construct->add_option("--m", co.m, "construction size")->required()->check(CLI::Range(1, 20));
    construct->add_option("--rho", co.rho, "threshold, p/q or exact decimal")->required();
    construct->add_option("--family", co.family, "blowup (m centers) | hard (3m centers, weight-m bitstrings)")
        ->check(CLI::IsMember({"blowup", "hard"}))
        ->capture_default_str();
    construct->add_option("--weight", co.weight, "keep only bitstrings with this many ones, 0 = family default");
    construct->add_option("--out", co.out, "output directory")->required();
    construct->callback([&] { action = [&] { return do_construct(co, out); }; });

    ConvertArgs cv;
    auto* convert = app.add_subcommand("convert", "perturbation sets to perturbation maps and back");
    auto* sets_opt = convert->add_option("--sets", cv.sets, "perturbation sets JSON")->check(CLI::ExistingFile);
    auto* maps_opt = convert->add_option("--maps", cv.maps, "finite image-map adversary JSON")->check(CLI::ExistingFile);
    sets_opt->excludes(maps_opt);
    convert->add_option("--out", cv.out, "output JSON")->required();
    convert->callback([&] {
        if (cv.sets.empty() == cv.maps.empty()) throw CLI::ValidationError("convert", "give exactly one of --sets, --maps");
        action = [&] { return do_convert(cv, out); };
    });

    ExperimentArgs ex;
    auto* experiment = app.add_subcommand("experiment", "run a seeded experiment; writes report.json and trials.csv");
    experiment->add_option("kind", ex.kind, "uc|sandwich|relaxed_competition|tolerant|lowerbound|sine|finite_g")
        ->required();
    experiment->add_option("--config", ex.config, "JSON or key = value config file")->check(CLI::ExistingFile);
    experiment->add_option("--out", ex.out, "output directory (default probrobust-out/<kind>)");
    add_jobs(experiment, ex.jobs);
    const std::vector<std::pair<std::string, std::string>> keys{
        {"seed", "master seed (required here or in the config)"},
        {"trials", "trials per size or round"},
        {"sizes", "comma-separated increasing sample sizes"},
        {"epsilon", "accuracy target"},
        {"delta", "failure probability"},
        {"rho", "threshold, p/q or exact decimal"},
        {"rho-star", "benchmark threshold, p/q or exact decimal"},
        {"r", "tolerant radius"},
        {"loss", loss_grammar},
        {"scenario", "relaxed_competition: hard_family|random_atoms"},
        {"rule", "relaxed_competition: prerm|rerm"},
        {"m", "construction size"},
        {"distributions", "number of hard distributions"},
        {"dim", "dimension"},
        {"class-size", "class size"},
        {"atoms", "comma-separated atom counts"},
        {"radius", "translation radius"},
        {"support", "support size"},
        {"noise", "label noise"},
        {"n-cap", "largest n the doubling may reach"},
    };
    for (const auto& [flag, help] : keys) {
        std::string key = flag;
        std::replace(key.begin(), key.end(), '-', '_');
        experiment->add_option_function<std::string>(
            "--" + flag, [&ex, key](const std::string& v) { ex.overrides[key] = v; }, help);
    }
    experiment->callback([&] { action = [&] { return do_experiment(ex, out); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        return action();
    } catch (const ParseError& e) {
        err << "malformed input: " << e.what() << '\n';
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
    } catch (const std::filesystem::filesystem_error& e) {
        err << "file error: " << e.what() << '\n';
    }
    return exit_invalid;
}

}  // namespace probrobust::cli
