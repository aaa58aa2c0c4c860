#include "probrobust/learners.hpp"

#include "probrobust/errors.hpp"
#include "probrobust/parallel.hpp"
#include "probrobust/simd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace probrobust {
namespace {

std::uint64_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// index-th smallest mask over `bits` positions with exactly `ones` set.
std::uint64_t unrank_mask(std::uint64_t index, std::size_t bits, std::size_t ones) {
    std::uint64_t mask = 0;
    for (std::size_t j = bits; j-- > 0 && ones > 0;) {
        const std::uint64_t below = binomial(j, ones);
        if (index >= below) {
            mask |= std::uint64_t{1} << j;
            index -= below;
            --ones;
        }
    }
    return mask;
}

std::uint64_t rank_mask(std::uint64_t mask, std::size_t bits) {
    std::uint64_t index = 0;
    std::size_t ones = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t j = bits; j-- > 0 && ones > 0;) {
        if ((mask >> j) & 1u) {
            index += binomial(j, ones);
            --ones;
        }
    }
    return index;
}

Vector normalized(Vector w) {
    const double norm = lp_norm(w, 2.0);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("halfspace direction must be non-zero and finite");
    for (double& c : w) c /= norm;
    return w;
}

}  // namespace

HypothesisClass HypothesisClass::explicit_list(std::vector<Hypothesis> members) {
    if (members.empty()) throw ValidationError("hypothesis class is empty");
    const DomainKind kind = members.front().domain();
    const auto dim = members.front().dimension();
    for (const auto& h : members) {
        if (h.domain() != kind || h.dimension() != dim) throw ValidationError("class members disagree on domain");
    }
    const std::size_t n = members.size();
    return HypothesisClass(ExplicitClass{std::move(members)}, n);
}

HypothesisClass HypothesisClass::halfspace_grid(std::size_t dim, std::size_t count, std::uint64_t seed) {
    if (dim == 0 || count == 0) throw ValidationError("halfspace grid needs dim >= 1 and count >= 1");
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> dirs;
    while (dirs.size() < count) {
        Vector w(dim);
        for (double& c : w) c = normal(rng);
        if (lp_norm(w, 2.0) == 0.0) continue;
        w = normalized(std::move(w));
        if (std::find(dirs.begin(), dirs.end(), w) == dirs.end()) dirs.push_back(std::move(w));
    }
    return HypothesisClass(HalfspaceGrid{dim, std::move(dirs)}, count);
}

HypothesisClass HypothesisClass::halfspace_grid(std::vector<Vector> directions) {
    if (directions.empty()) throw ValidationError("halfspace grid is empty");
    const std::size_t dim = directions.front().size();
    std::vector<Vector> dirs;
    for (auto& w : directions) {
        if (w.size() != dim) throw ValidationError("halfspace grid mixes dimensions");
        // Directions that are already unit up to rounding are kept bit for bit,
        // so a grid written to JSON reads back unchanged.
        Vector u = std::fabs(lp_norm(w, 2.0) - 1.0) <= 1e-12 ? std::move(w) : normalized(std::move(w));
        if (std::find(dirs.begin(), dirs.end(), u) == dirs.end()) dirs.push_back(std::move(u));
    }
    const std::size_t n = dirs.size();
    return HypothesisClass(HalfspaceGrid{dim, std::move(dirs)}, n);
}

HypothesisClass HypothesisClass::sine_grid(std::vector<double> omegas) {
    if (omegas.empty()) throw ValidationError("sine grid is empty");
    for (const double w : omegas) {
        if (!std::isfinite(w)) throw ValidationError("sine frequencies must be finite");
    }
    const std::size_t n = omegas.size();
    return HypothesisClass(SineGrid{std::move(omegas)}, n);
}

HypothesisClass HypothesisClass::construction(std::shared_ptr<const ConstructionGeometry> geometry,
                                              std::optional<std::size_t> weight) {
    if (!geometry) throw ValidationError("construction class needs a geometry");
    const std::size_t k = geometry->centers();
    if (weight && *weight > k) throw ValidationError("bitstring weight exceeds the number of centers");
    const std::uint64_t n = weight ? binomial(k, *weight) : (std::uint64_t{1} << k);
    return HypothesisClass(ConstructionClass{std::move(geometry), weight}, static_cast<std::size_t>(n));
}

DomainKind HypothesisClass::domain() const noexcept {
    return std::holds_alternative<HalfspaceGrid>(v_) || std::holds_alternative<SineGrid>(v_)
               ? DomainKind::vector
               : std::holds_alternative<ExplicitClass>(v_) ? std::get<ExplicitClass>(v_).members.front().domain()
                                                          : DomainKind::point;
}

Hypothesis HypothesisClass::member(std::size_t index) const {
    if (index >= size_) throw ValidationError("class index out of range");
    return std::visit(
        [&](const auto& c) -> Hypothesis {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ExplicitClass>) {
                return c.members[index];
            } else if constexpr (std::is_same_v<T, HalfspaceGrid>) {
                return Hypothesis::halfspace(c.directions[index]);
            } else if constexpr (std::is_same_v<T, SineGrid>) {
                return Hypothesis::sine(c.omegas[index]);
            } else {
                const std::uint64_t bits =
                    c.weight ? unrank_mask(index, c.geometry->centers(), *c.weight) : static_cast<std::uint64_t>(index);
                return Hypothesis::construction(bits, c.geometry);
            }
        },
        v_);
}

std::vector<Hypothesis> HypothesisClass::members() const {
    std::vector<Hypothesis> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.push_back(member(i));
    return out;
}

std::optional<std::size_t> HypothesisClass::index_of(const Hypothesis& h) const {
    if (const auto* c = std::get_if<ConstructionClass>(&v_)) {
        const auto* ch = std::get_if<ConstructionHypothesis>(&h.variant());
        if (ch == nullptr || !(*ch->geometry == *c->geometry)) return std::nullopt;
        const std::size_t k = c->geometry->centers();
        if (c->weight) {
            if (static_cast<std::size_t>(std::popcount(ch->bits)) != *c->weight) return std::nullopt;
            return static_cast<std::size_t>(rank_mask(ch->bits, k));
        }
        return static_cast<std::size_t>(ch->bits);
    }
    for (std::size_t i = 0; i < size_; ++i) {
        if (member(i) == h) return i;
    }
    return std::nullopt;
}

std::size_t default_budget() {
    if (const char* env = std::getenv("PROBROBUST_BUDGET"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0) throw ValidationError("PROBROBUST_BUDGET must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    return 1'000'000;
}

int halfspace_worst_loss(const Vector& w, const LabeledExample& ex, double p, double gamma) {
    if (!(gamma > 0.0)) throw ValidationError("ball radius must be positive");
    if (lp_norm(w, 2.0) == 0.0) throw ValidationError("halfspace weight vector must not be zero");
    const Vector* x = std::get_if<Vector>(&ex.x);
    if (x == nullptr) throw DomainMismatch("halfspace needs a vector instance");
    const double score = static_cast<double>(ex.y) * dot(w, *x);
    return score > gamma * lp_norm(w, dual_exponent(p)) ? 0 : 1;
}

LossMatrix loss_matrix(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv, const Dataset& data,
                       std::uint64_t seed, std::size_t jobs, std::size_t budget) {
    if (data.empty()) throw EmptyDataset("learning from an empty dataset");
    const std::size_t f = cls.size();
    if (f > budget / data.size()) {
        throw BudgetExceeded("class of " + std::to_string(f) + " members on " + std::to_string(data.size()) +
                             " examples exceeds the evaluation budget of " + std::to_string(budget));
    }
    const std::vector<Hypothesis> members = cls.members();
    const bool worst = std::holds_alternative<WorstCaseLoss>(spec.variant());
    const LpBall* ball = adv.ball();
    if (worst && ball != nullptr && !std::holds_alternative<HalfspaceGrid>(cls.variant())) {
        bool all_halfspaces = true;
        for (const auto& h : members) all_halfspaces = all_halfspaces && std::holds_alternative<Halfspace>(h.variant());
        if (!all_halfspaces) {
            throw UnsupportedOperation(
                "worst-case loss against a sampled l_p ball needs halfspaces or a discretized adversary");
        }
    }

    LossMatrix m{data.size(), f, std::vector<double>(data.size() * f)};
    parallel_for(data.size(), jobs, [&](std::size_t i) {
        double* row = m.values.data() + i * f;
        if (worst && ball != nullptr) {
            for (std::size_t j = 0; j < f; ++j) {
                row[j] = halfspace_worst_loss(std::get<Halfspace>(members[j].variant()).w, data[i], ball->p, ball->gamma);
            }
            return;
        }
        const MarginEvaluator ev(adv, data[i], example_seed(seed, i));
        for (std::size_t j = 0; j < f; ++j) row[j] = loss_from_margin(spec, ev(members[j]));
    });
    return m;
}

std::vector<double> column_means(const LossMatrix& m) {
    std::vector<double> acc(m.functions, 0.0);
    for (std::size_t i = 0; i < m.examples; ++i) simd::accumulate(acc, m.row(i), 1.0);
    for (double& v : acc) v /= static_cast<double>(m.examples);
    return acc;
}

std::size_t select_minimizer(const std::vector<double>& risks, TieBreak tie, std::uint64_t tie_seed) {
    if (risks.empty()) throw ValidationError("no candidates to minimize over");
    const double best = *std::min_element(risks.begin(), risks.end());
    std::vector<std::size_t> ties;
    for (std::size_t j = 0; j < risks.size(); ++j) {
        if (risks[j] == best) ties.push_back(j);
    }
    if (tie == TieBreak::lowest_index || ties.size() == 1) return ties.front();
    Rng rng = make_rng(tie_seed);
    std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
    return ties[pick(rng)];
}

ErmResult erm(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv, const Dataset& data,
              std::uint64_t seed, const ErmOptions& options) {
    const LossMatrix m = loss_matrix(spec, cls, adv, data, seed, options.jobs, options.budget);
    const std::vector<double> risks = column_means(m);
    const std::size_t best = select_minimizer(risks, options.tie, options.tie_seed);
    return ErmResult{best, cls.member(best), risks[best], m.examples * m.functions};
}

ErmResult rerm(const HypothesisClass& cls, const Adversary& adv, const Dataset& data, std::uint64_t seed,
               const ErmOptions& options) {
    return erm(LossSpec::worst_case(), cls, adv, data, seed, options);
}

ErmResult prerm(const Rational& rho, const HypothesisClass& cls, const Adversary& adv, const Dataset& data,
                std::uint64_t seed, const ErmOptions& options) {
    return erm(LossSpec::rho_threshold(rho), cls, adv, data, seed, options);
}

}  // namespace probrobust
