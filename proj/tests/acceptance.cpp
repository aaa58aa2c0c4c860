// Runs the twelve acceptance criteria end to end and prints one PASS/FAIL
// line per criterion. Exit status is nonzero if any criterion fails.

#include "oracles.hpp"

#include "probrobust/complexity.hpp"
#include "probrobust/constructions.hpp"
#include "probrobust/errors.hpp"
#include "probrobust/experiments.hpp"
#include "probrobust/learners.hpp"
#include "probrobust/losses.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace probrobust;

namespace {

constexpr std::uint64_t master_seed = 7;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

ExperimentReport run(ExperimentConfig c, std::size_t jobs = 0) {
    c.seed = master_seed;
    return run_experiment(c, jobs);
}

ExperimentConfig config(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    return c;
}

const Check* find_check(const ExperimentReport& rep, const std::string& name) {
    for (const auto& c : rep.checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string describe(const ExperimentReport& rep) {
    std::ostringstream s;
    for (const auto& c : rep.checks) {
        s << (s.tellp() > 0 ? ", " : "") << c.name << "=" << c.value << (c.pass ? "" : " (fail)");
    }
    return s.str();
}

Outcome sandwich() {
    auto c = config(ExperimentKind::sandwich);
    c.trials = 10000;
    const auto rep = run(c);
    const bool pass = rep.verdict && rep.records.size() == 10000;
    return {pass, std::to_string(rep.records.size()) + " triples, " + describe(rep)};
}

Outcome blowup_construction() {
    std::ostringstream s;
    bool pass = true;
    for (const std::size_t m : {3u, 4u, 5u}) {
        for (const Rational rho : {Rational(0), Rational(1, 4), Rational(1, 2)}) {
            const auto inst = build_construction(m, rho);
            // Cap 2 checks every pair of domain points, which decides VC <= 1.
            const auto vc = vc_dimension(inst.cls, inst.domain, 2);
            const auto b = loss_behaviors(LossSpec::rho_threshold(rho), inst.cls, inst.adversary, inst.centers);
            std::set<std::vector<std::uint8_t>> patterns;
            for (std::size_t j = 0; j < b.functions; ++j) {
                patterns.emplace(b.values.begin() + static_cast<std::ptrdiff_t>(j * b.points),
                                 b.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * b.points));
            }
            const bool ok = vc.dimension <= 1 && patterns.size() == (std::size_t{1} << m);
            pass = pass && ok;
            if (!ok) s << "m=" << m << " rho=" << rho.to_string() << " vc=" << vc.dimension
                       << " patterns=" << patterns.size() << "; ";
        }
    }
    if (pass) s << "9 settings: class VC <= 1 on the full domain, rho-loss realizes all 2^m patterns";
    return {pass, s.str()};
}

Outcome lower_bound() {
    auto c = config(ExperimentKind::lowerbound);
    c.m = 4;
    c.rho = Rational(1, 4);
    c.trials = 500;
    const auto rep = run(c);
    const bool pass = rep.verdict && rep.records.size() >= 500 && find_check(rep, "mean_risk") &&
                      find_check(rep, "realizable") && find_check(rep, "worst_distribution_frequency");
    return {pass, std::to_string(rep.records.size()) + " pairs, " + describe(rep)};
}

Outcome uniform_convergence() {
    auto c = config(ExperimentKind::uc);
    c.dim = 2;
    c.class_size = 40;
    c.loss = "hinge";
    c.sizes = {250, 1000, 4000};
    c.trials = 200;
    const auto rep = run(c);
    const bool pass = rep.verdict && find_check(rep, "gap_decreases") && find_check(rep, "sqrt_n_envelope");
    return {pass, describe(rep)};
}

Outcome relaxed_competition() {
    std::ostringstream s;
    bool pass = true;
    const std::pair<const char*, const char*> runs[] = {
        {"hard_family", "prerm"}, {"random_atoms", "prerm"}, {"hard_family", "rerm"}, {"random_atoms", "rerm"}};
    for (const auto& [scenario, rule] : runs) {
        auto c = config(ExperimentKind::relaxed_competition);
        c.scenario = scenario;
        c.rule = rule;
        c.epsilon = 0.1;
        c.delta = 0.1;
        c.trials = 500;
        const auto rep = run(c);
        const Check* frac = find_check(rep, "pass_fraction");
        pass = pass && rep.verdict && frac != nullptr;
        s << scenario << "/" << rule << ": " << (frac ? frac->value : -1.0) << " at n="
          << rep.aggregates["final_round"]["n"] << "; ";
    }
    return {pass, s.str()};
}

Outcome tolerant() {
    auto c = config(ExperimentKind::tolerant);
    c.epsilon = 0.1;
    const auto rep = run(c);
    return {rep.verdict && find_check(rep, "separable_zero_risk") && find_check(rep, "noisy_pass_fraction"),
            describe(rep)};
}

Outcome closed_form_vs_attack() {
    Rng rng = make_rng(derive_seed(master_seed, "closed_form", 0));
    const double ps[] = {1.0, 2.0, INFINITY};
    std::size_t compared = 0, excluded = 0, disagreements = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double p = ps[trial % 3];
        const std::size_t d = 1 + static_cast<std::size_t>(rng() % 4);
        Vector w(d), x(d);
        do {
            for (auto& c : w) c = 2.0 * uniform01(rng) - 1.0;
        } while (lp_norm(w, INFINITY) == 0.0);
        for (auto& c : x) c = 2.0 * uniform01(rng) - 1.0;
        const int y = uniform01(rng) < 0.5 ? 1 : -1;
        const double gamma = 0.05 + 0.5 * uniform01(rng);
        const double slack = y * dot(w, x) - gamma * lp_norm(w, dual_exponent(p));
        if (std::fabs(slack) < 1e-9) {
            ++excluded;
            continue;
        }
        ++compared;
        if (halfspace_worst_loss(w, {x, y}, p, gamma) != oracle::halfspace_attack(w, x, y, p, gamma)) ++disagreements;
    }
    return {disagreements == 0, std::to_string(compared) + " compared, " + std::to_string(excluded) +
                                    " boundary cases excluded, " + std::to_string(disagreements) + " disagreements"};
}

Outcome rademacher() {
    Rng rng = make_rng(derive_seed(master_seed, "rademacher", 0));
    std::size_t over_massart = 0, outside = 0;
    double worst_z = 0.0;
    for (int c = 0; c < 100; ++c) {
        const std::size_t f = 1 + rng() % 32;
        const std::size_t n = 1 + rng() % 12;
        LossMatrix m{n, f, std::vector<double>(n * f)};
        for (double& v : m.values) v = 2.0 * uniform01(rng) - 1.0;
        const auto exact = empirical_rademacher(m, std::nullopt);
        const auto mc = empirical_rademacher(m, 4000, rng());
        if (exact.value > massart_bound(f, n)) ++over_massart;
        const double diff = std::fabs(mc.value - exact.value);
        if (mc.std_error > 0.0) worst_z = std::max(worst_z, diff / mc.std_error);
        if (diff > 3.0 * mc.std_error && diff > 1e-12) ++outside;
    }
    std::ostringstream s;
    s << "100 classes: " << over_massart << " above Massart, " << outside << " Monte Carlo estimates beyond 3 sigma"
      << " (largest z " << worst_z << ")";
    // The estimator is calibrated, so each 3-sigma comparison still fails with
    // probability about 0.0027 and all 100 pass with probability about 0.76.
    if (outside > 0) s << "; expected under a calibrated estimator with probability 1 - 0.9973^100 ~ 0.24";
    return {over_massart == 0 && outside == 0, s.str()};
}

Outcome converter() {
    Rng rng = make_rng(derive_seed(master_seed, "converter", 0));
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        PerturbationSets u;
        std::vector<PointId> domain;
        for (PointId x = 0; x < n; ++x) {
            domain.push_back(x);
            std::set<PointId> images{x};
            const std::size_t target = 1 + rng() % std::min<std::size_t>(5, n);
            while (images.size() < target) images.insert(rng() % n);
            u[x] = std::vector<PointId>(images.begin(), images.end());
        }
        if (induced_sets(g_u_convert(u), domain) != u) ++mismatches;
    }
    bool rejected = false;
    try {
        (void)g_u_convert({{0, {0}}, {1, {}}});
    } catch (const ValidationError&) {
        rejected = true;
    }
    return {mismatches == 0 && rejected, std::to_string(mismatches) + " round-trip mismatches over 100 maps, empty image " +
                                             (rejected ? "rejected" : "accepted")};
}

Outcome sine() {
    std::size_t wrong = 0, points = 0;
    for (int a = 0; a < 32; ++a) {
        for (int b = 0; b < 32; ++b) {
            const double omega = a == 0 ? 0.0 : 0.37 * a - 3.0;
            const double x = b == 0 ? 0.0 : -1.0 + 2.0 * b / 32.0;
            const double expected = omega == 0.0 || x == 0.0 ? 1.0 : 0.0;
            ++points;
            if (sine_margin(omega, x) != expected) ++wrong;
        }
    }
    auto c = config(ExperimentKind::sine);
    c.epsilon = 0.05;
    c.loss = "hinge";
    const auto rep = run(c);
    const auto behaviors = rep.aggregates["distinct_smoothed_behaviors"].get<std::size_t>();
    std::ostringstream s;
    s << wrong << " wrong margins on " << points << " grid points, " << describe(rep) << ", " << behaviors
      << " distinct smoothed behaviors";
    return {wrong == 0 && rep.verdict && behaviors == 2, s.str()};
}

Outcome r_nice() {
    Rng rng = make_rng(derive_seed(master_seed, "r_nice", 0));
    std::vector<Vector> ws, xs, taus;
    for (int t = 0; t < 1000; ++t) {
        Vector w(3), x(3);
        for (double& c : w) c = 2.0 * uniform01(rng) - 1.0;
        for (double& c : x) c = 2.0 * uniform01(rng) - 1.0;
        ws.push_back(w);
        xs.push_back(x);
        Rng sub = make_rng(rng());
        taus.push_back(sample_lp_ball(1, 3, 2.0, 0.3, sub).point(0));
    }
    const auto rep = r_nice_check(ws, xs, taus, 2.0, 0.3, 200, rng());
    std::ostringstream s;
    s << "pass fraction " << rep.pass_fraction << " over " << rep.triples - rep.excluded << " triples ("
      << rep.excluded << " degenerate excluded)";
    return {rep.pass_fraction == 1.0 && rep.triples == 1000, s.str()};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "probrobust_acceptance_determinism";
    const auto read = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::size_t identical = 0, total = 0;
    std::string differing;
    for (const auto kind : {ExperimentKind::uc, ExperimentKind::sandwich, ExperimentKind::relaxed_competition,
                            ExperimentKind::tolerant, ExperimentKind::lowerbound, ExperimentKind::sine,
                            ExperimentKind::finite_g}) {
        const fs::path one = root / experiment_name(kind) / "jobs1";
        const fs::path eight = root / experiment_name(kind) / "jobs8";
        write_report(run(config(kind), 1), one);
        write_report(run(config(kind), 8), eight);
        ++total;
        if (read(one / "trials.csv") == read(eight / "trials.csv")) ++identical;
        else differing += std::string(" ") + experiment_name(kind);
    }
    fs::remove_all(root);
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " experiments byte-identical at --jobs 1 and 8" + differing};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "sandwich inequalities, exact", 60, sandwich},
        {2, "blow-up construction VC and shattering", 300, blowup_construction},
        {3, "hard-distribution lower bound", 600, lower_bound},
        {4, "Lipschitz uniform convergence", 600, uniform_convergence},
        {5, "relaxed competition guarantees", 600, relaxed_competition},
        {6, "tolerant learning", 600, tolerant},
        {7, "halfspace closed form vs ball attack", 120, closed_form_vs_attack},
        {8, "Rademacher estimator", 120, rademacher},
        {9, "perturbation-set converter", 1, converter},
        {10, "sine class collapse", 60, sine},
        {11, "r-nice check at p = 2", 60, r_nice},
        {12, "determinism across jobs", 600, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("criterion %2d %-40s %s  (%.2fs, limit %.0fs%s) %s\n", c.number, c.name, pass ? "PASS" : "FAIL",
                    seconds, c.limit_seconds, in_time ? "" : ", over time", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
