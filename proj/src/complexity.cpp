#include "probrobust/complexity.hpp"

#include "probrobust/errors.hpp"
#include "probrobust/simd.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace probrobust {
namespace {

void check_budget(std::size_t functions, std::size_t points, std::size_t budget) {
    if (points != 0 && functions > budget / points) {
        throw BudgetExceeded("behavior table of " + std::to_string(functions) + " x " + std::to_string(points) +
                             " exceeds the evaluation budget of " + std::to_string(budget));
    }
}

}  // namespace

BehaviorMatrix behaviors(const HypothesisClass& cls, const std::vector<Instance>& points, std::size_t budget) {
    check_budget(cls.size(), points.size(), budget);
    BehaviorMatrix b{points.size(), cls.size(), std::vector<std::uint8_t>(points.size() * cls.size())};
    for (std::size_t j = 0; j < cls.size(); ++j) {
        const Hypothesis h = cls.member(j);
        for (std::size_t i = 0; i < points.size(); ++i) b.values[j * b.points + i] = evaluate(h, points[i]) > 0 ? 1 : 0;
    }
    return b;
}

BehaviorMatrix loss_behaviors(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv,
                              const Dataset& examples, std::uint64_t seed, std::size_t budget) {
    if (!spec.is_binary()) throw ValidationError("loss class VC needs a {0,1}-valued loss (worst or rho)");
    if (!adv.is_exact()) throw ValidationError("loss class VC needs an exact adversary");
    check_budget(cls.size(), examples.size(), budget);
    BehaviorMatrix b{examples.size(), cls.size(), std::vector<std::uint8_t>(examples.size() * cls.size())};
    const std::vector<Hypothesis> members = cls.members();
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const MarginEvaluator ev(adv, examples[i], example_seed(seed, i));
        for (std::size_t j = 0; j < members.size(); ++j) {
            b.values[j * b.points + i] = exact_loss_from_margin(spec, ev(members[j]))->is_zero() ? 0 : 1;
        }
    }
    return b;
}

bool shattered(const BehaviorMatrix& b, std::span<const std::size_t> subset) {
    const std::size_t s = subset.size();
    if (s >= 64) return false;
    const std::uint64_t needed = std::uint64_t{1} << s;
    if (needed > b.functions) return false;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(needed), 0);
    std::uint64_t distinct = 0;
    for (std::size_t j = 0; j < b.functions && distinct < needed; ++j) {
        std::uint64_t pattern = 0;
        for (std::size_t t = 0; t < s; ++t) pattern |= static_cast<std::uint64_t>(b.at(j, subset[t])) << t;
        if (!seen[pattern]) {
            seen[pattern] = 1;
            ++distinct;
        }
    }
    return distinct == needed;
}

bool shatter_check(const HypothesisClass& cls, const std::vector<Instance>& points) {
    if (points.size() > 20) throw ValidationError("shatter_check accepts at most 20 points");
    const BehaviorMatrix b = behaviors(cls, points);
    std::vector<std::size_t> all(points.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return shattered(b, all);
}

VcResult vc_dimension(const BehaviorMatrix& b, std::size_t cap) {
    VcResult result;
    std::vector<std::vector<std::size_t>> level;
    std::set<std::vector<std::size_t>> level_set;
    for (std::size_t i = 0; i < b.points && cap >= 1; ++i) {
        ++result.subsets_checked;
        const std::size_t one[] = {i};
        if (shattered(b, one)) {
            level.push_back({i});
            level_set.insert({i});
        }
    }
    if (level.empty()) return result;
    result.dimension = 1;
    result.witness = level.front();
    std::vector<std::size_t> singles;
    for (const auto& s : level) singles.push_back(s.front());

    for (std::size_t size = 2; size <= cap && size < 64 && (std::uint64_t{1} << size) <= b.functions; ++size) {
        std::vector<std::vector<std::size_t>> next;
        std::set<std::vector<std::size_t>> next_set;
        for (const auto& base : level) {
            for (auto it = std::upper_bound(singles.begin(), singles.end(), base.back()); it != singles.end(); ++it) {
                std::vector<std::size_t> cand = base;
                cand.push_back(*it);
                // Every (size-1)-subset must already be shattered.
                bool closed = true;
                for (std::size_t drop = 0; drop + 1 < cand.size() && closed; ++drop) {
                    std::vector<std::size_t> sub;
                    for (std::size_t t = 0; t < cand.size(); ++t) {
                        if (t != drop) sub.push_back(cand[t]);
                    }
                    closed = level_set.count(sub) > 0;
                }
                if (!closed) continue;
                ++result.subsets_checked;
                if (shattered(b, cand)) {
                    next_set.insert(cand);
                    next.push_back(std::move(cand));
                }
            }
        }
        if (next.empty()) break;
        result.dimension = size;
        result.witness = next.front();
        level = std::move(next);
        level_set = std::move(next_set);
    }
    return result;
}

VcResult vc_dimension(const HypothesisClass& cls, const std::vector<Instance>& domain, std::size_t cap) {
    return vc_dimension(behaviors(cls, domain), cap);
}

VcResult loss_class_vc(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv,
                       const Dataset& examples, std::size_t cap, std::uint64_t seed) {
    return vc_dimension(loss_behaviors(spec, cls, adv, examples, seed), cap);
}

RademacherEstimate empirical_rademacher(const LossMatrix& values, std::optional<std::size_t> draws,
                                        std::uint64_t seed) {
    const std::size_t n = values.examples;
    const std::size_t f = values.functions;
    if (n == 0 || f == 0) throw ValidationError("Rademacher complexity of an empty value matrix");
    std::vector<double> acc(f);
    const auto sup_for = [&](auto&& sign_of) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) simd::accumulate(acc, values.row(i), sign_of(i));
        return *std::max_element(acc.begin(), acc.end()) / static_cast<double>(n);
    };

    RademacherEstimate out;
    if (!draws) {
        if (n > rademacher_exact_cap) {
            throw ValidationError("exact Rademacher mode is limited to " + std::to_string(rademacher_exact_cap) +
                                  " examples");
        }
        const std::uint64_t patterns = std::uint64_t{1} << n;
        const std::uint64_t all = patterns - 1;
        double total = 0.0;
        // Each pattern is paired with its negation before summing, so a class
        // whose sup is linear (a single function) cancels to exactly 0.
        for (std::uint64_t s = 0; s < patterns / 2; ++s) {
            const double up = sup_for([&](std::size_t i) { return (s >> i) & 1u ? 1.0 : -1.0; });
            const double down = sup_for([&](std::size_t i) { return ((all ^ s) >> i) & 1u ? 1.0 : -1.0; });
            total += up + down;
        }
        out.value = total / static_cast<double>(patterns);
        out.patterns = static_cast<std::size_t>(patterns);
        out.exact = true;
        return out;
    }
    if (*draws == 0) throw ValidationError("Monte Carlo Rademacher needs at least one draw");
    Rng rng = make_rng(seed);
    std::vector<double> sigma(n);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t t = 0; t < *draws; ++t) {
        for (std::size_t i = 0; i < n; i += 64) {
            const std::uint64_t bits = rng();
            for (std::size_t b = 0; b < 64 && i + b < n; ++b) sigma[i + b] = (bits >> b) & 1u ? 1.0 : -1.0;
        }
        const double v = sup_for([&](std::size_t i) { return sigma[i]; });
        const double delta = v - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (v - mean);
    }
    out.value = mean;
    out.patterns = *draws;
    out.std_error = *draws > 1 ? std::sqrt(m2 / static_cast<double>(*draws - 1) / static_cast<double>(*draws)) : 0.0;
    return out;
}

double massart_bound(std::size_t functions, std::size_t n) {
    if (functions == 0 || n == 0) throw ValidationError("Massart bound needs F >= 1 and n >= 1");
    return std::sqrt(2.0 * std::log(static_cast<double>(functions)) / static_cast<double>(n));
}

double MetricSpaceSample::distance(std::size_t a, std::size_t b) const {
    const Vector& u = elements.at(a);
    const Vector& v = elements.at(b);
    if (u.size() != v.size()) throw ValidationError("metric sample mixes dimensions");
    Vector diff(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) diff[k] = u[k] - v[k];
    return lp_norm(diff, p);
}

bool is_cover(const MetricSpaceSample& space, double r, std::span<const std::size_t> centers) {
    for (std::size_t e = 0; e < space.elements.size(); ++e) {
        bool covered = false;
        for (const std::size_t c : centers) {
            if (space.distance(e, c) <= r) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

CoverResult covering_number_greedy(const MetricSpaceSample& space, double r) {
    if (!(r > 0.0)) throw ValidationError("cover radius must be positive");
    CoverResult out;
    for (std::size_t e = 0; e < space.elements.size(); ++e) {
        const bool covered = std::any_of(out.centers.begin(), out.centers.end(),
                                         [&](std::size_t c) { return space.distance(e, c) <= r; });
        if (!covered) out.centers.push_back(e);
    }
    out.size = out.centers.size();
    return out;
}

CoverResult covering_number_exact(const MetricSpaceSample& space, double r) {
    if (!(r > 0.0)) throw ValidationError("cover radius must be positive");
    const std::size_t n = space.elements.size();
    if (n > 20) throw ValidationError("exact cover accepts at most 20 elements");
    if (n == 0) return {};
    std::vector<std::uint32_t> reach(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t e = 0; e < n; ++e) {
            if (space.distance(e, c) <= r) reach[c] |= std::uint32_t{1} << e;
        }
    }
    const std::uint32_t all = n == 32 ? ~0u : (std::uint32_t{1} << n) - 1;
    for (std::size_t k = 1; k <= n; ++k) {
        // Combinations of k indices in lexicographic order.
        std::vector<std::size_t> pick(k);
        for (std::size_t i = 0; i < k; ++i) pick[i] = i;
        for (;;) {
            std::uint32_t covered = 0;
            for (const std::size_t c : pick) covered |= reach[c];
            if (covered == all) return {k, pick};
            std::size_t i = k;
            while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t t = i; t < k; ++t) pick[t] = pick[t - 1] + 1;
        }
    }
    return {};
}

Vector dual_witness(const Vector& w, double p) {
    const std::size_t d = w.size();
    Vector u(d, 0.0);
    if (std::isinf(p)) {
        for (std::size_t k = 0; k < d; ++k) u[k] = w[k] > 0.0 ? 1.0 : (w[k] < 0.0 ? -1.0 : 0.0);
        return u;
    }
    if (p == 1.0) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < d; ++k) {
            if (std::fabs(w[k]) > std::fabs(w[best])) best = k;
        }
        u[best] = w[best] >= 0.0 ? 1.0 : -1.0;
        return u;
    }
    const double q = dual_exponent(p);
    for (std::size_t k = 0; k < d; ++k) u[k] = std::copysign(std::pow(std::fabs(w[k]), q - 1.0), w[k]);
    const double norm = lp_norm(u, p);
    for (double& c : u) c /= norm;
    return u;
}

RNiceReport r_nice_check(const std::vector<Vector>& ws, const std::vector<Vector>& xs, const std::vector<Vector>& taus,
                         double p, double r, std::size_t trials, std::uint64_t seed) {
    if (ws.size() != xs.size() || ws.size() != taus.size()) throw ValidationError("r-nice triples are misaligned");
    if (!(r > 0.0)) throw ValidationError("r-nice radius must be positive");
    RNiceReport report;
    report.triples = ws.size();
    if (p != 2.0) {
        report.note =
            "p != 2: the center offset and the Hoelder step use the dual norm ||w||_q, not ||w||_p";
    }
    for (std::size_t t = 0; t < ws.size(); ++t) {
        const Vector& w = ws[t];
        const Vector& x = xs[t];
        const Vector& tau = taus[t];
        const std::size_t d = w.size();
        if (x.size() != d || tau.size() != d) throw ValidationError("r-nice triple mixes dimensions");
        if (lp_norm(w, 2.0) == 0.0) throw ValidationError("r-nice check needs w != 0");
        if (lp_norm(tau, p) > r) throw ValidationError("r-nice perturbation tau lies outside the r-ball");

        Vector moved(d);
        for (std::size_t k = 0; k < d; ++k) moved[k] = x[k] + tau[k];
        const double s = dot(w, moved);
        if (std::fabs(s) < degenerate_margin) {
            ++report.excluded;
            continue;
        }
        const int c = s > 0.0 ? 1 : -1;
        const Vector u = dual_witness(w, p);
        Vector origin(d);
        for (std::size_t k = 0; k < d; ++k) origin[k] = moved[k] + static_cast<double>(c) * r * u[k];

        Rng rng = make_rng(derive_seed(seed, t));
        PointBlock kappas = sample_lp_ball(trials, d, p, r, rng);
        // Append the boundary point -c r u, which maps the center back to tau.
        PointBlock probe;
        probe.n = kappas.n + 1;
        probe.d = d;
        probe.columns.resize(probe.n * d);
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t j = 0; j < kappas.n; ++j) probe.columns[k * probe.n + j] = kappas.at(j, k);
            probe.columns[k * probe.n + kappas.n] = -static_cast<double>(c) * r * u[k];
        }
        std::vector<double> scores(probe.n);
        std::vector<std::uint8_t> flags(probe.n);
        simd::shifted_dots(probe.columns, probe.n, origin, w, scores);
        if (simd::mark_mistakes(scores, c, flags) == 0) {
            ++report.passed;
        } else {
            for (std::size_t j = 0; j < probe.n; ++j) {
                if (flags[j]) {
                    report.failures.push_back({t, probe.point(j)});
                    break;
                }
            }
        }
    }
    const std::size_t counted = report.triples - report.excluded;
    report.pass_fraction = counted == 0 ? 1.0 : static_cast<double>(report.passed) / static_cast<double>(counted);
    return report;
}

}  // namespace probrobust
