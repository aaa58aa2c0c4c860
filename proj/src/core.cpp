#include "probrobust/core.hpp"

#include "probrobust/errors.hpp"
#include "probrobust/simd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace probrobust {
namespace {

const Vector& as_vector(const Instance& x, const char* who) {
    const auto* v = std::get_if<Vector>(&x);
    if (v == nullptr) throw DomainMismatch(std::string(who) + " needs a vector instance, got a point id");
    return *v;
}

PointId as_point(const Instance& x, const char* who) {
    const auto* id = std::get_if<PointId>(&x);
    if (id == nullptr) throw DomainMismatch(std::string(who) + " needs a point id, got a vector instance");
    return *id;
}

double clamp_margin(double m) noexcept {
    return std::clamp(m, -1.0, 1.0);
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    const __int128 l = static_cast<__int128>(a / std::gcd(a, b)) * b;
    if (l > std::numeric_limits<std::int64_t>::max()) throw RationalOverflow("common denominator of weights overflows");
    return static_cast<std::int64_t>(l);
}

}  // namespace

DomainKind domain_kind(const Instance& x) noexcept {
    return std::holds_alternative<Vector>(x) ? DomainKind::vector : DomainKind::point;
}

const char* domain_name(DomainKind kind) noexcept {
    return kind == DomainKind::vector ? "vector" : "point";
}

int checked_label(long long value) {
    if (value != 1 && value != -1) throw ValidationError("labels must be -1 or +1, got " + std::to_string(value));
    return static_cast<int>(value);
}

void validate_dataset(const Dataset& data) {
    if (data.empty()) return;
    const DomainKind kind = domain_kind(data.front().x);
    const std::size_t dim = kind == DomainKind::vector ? std::get<Vector>(data.front().x).size() : 0;
    for (const auto& ex : data) {
        checked_label(ex.y);
        if (domain_kind(ex.x) != kind) throw ValidationError("dataset mixes vector instances and point ids");
        if (kind == DomainKind::vector && std::get<Vector>(ex.x).size() != dim) {
            throw ValidationError("dataset mixes vector dimensions");
        }
    }
}

int TableHypothesis::lookup(PointId id) const noexcept {
    const auto it = std::lower_bound(entries.begin(), entries.end(), id,
                                     [](const auto& e, PointId key) { return e.first < key; });
    return it != entries.end() && it->first == id ? it->second : fallback;
}

Hypothesis Hypothesis::halfspace(Vector w) {
    if (w.empty()) throw ValidationError("halfspace weight vector is empty");
    bool nonzero = false;
    for (const double c : w) {
        if (!std::isfinite(c)) throw ValidationError("halfspace weights must be finite");
        nonzero = nonzero || c != 0.0;
    }
    if (!nonzero) throw ValidationError("halfspace weight vector must not be zero");
    return Hypothesis(Halfspace{std::move(w)});
}

Hypothesis Hypothesis::table(std::vector<std::pair<PointId, int>> entries, int fallback) {
    checked_label(fallback);
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        checked_label(entries[i].second);
        if (i > 0 && entries[i].first == entries[i - 1].first) throw ValidationError("table maps a point twice");
    }
    return Hypothesis(TableHypothesis{std::move(entries), fallback});
}

Hypothesis Hypothesis::sine(double omega) {
    if (!std::isfinite(omega)) throw ValidationError("sine frequency must be finite");
    return Hypothesis(SineSign{omega});
}

Hypothesis Hypothesis::construction(std::uint64_t bits, std::shared_ptr<const ConstructionGeometry> geometry) {
    if (!geometry) throw ValidationError("construction hypothesis needs a geometry");
    if (geometry->centers() < 64 && (bits >> geometry->centers()) != 0) {
        throw ValidationError("bitstring longer than the geometry's center count");
    }
    return Hypothesis(ConstructionHypothesis{bits, std::move(geometry)});
}

DomainKind Hypothesis::domain() const noexcept {
    return std::holds_alternative<Halfspace>(v_) || std::holds_alternative<SineSign>(v_) ? DomainKind::vector
                                                                                          : DomainKind::point;
}

std::optional<std::size_t> Hypothesis::dimension() const noexcept {
    if (const auto* h = std::get_if<Halfspace>(&v_)) return h->w.size();
    if (std::holds_alternative<SineSign>(v_)) return 1;
    return std::nullopt;
}

bool operator==(const Hypothesis& a, const Hypothesis& b) {
    if (a.v_.index() != b.v_.index()) return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const T& rhs = std::get<T>(b.v_);
            if constexpr (std::is_same_v<T, Halfspace>) {
                return lhs.w == rhs.w;
            } else if constexpr (std::is_same_v<T, TableHypothesis>) {
                return lhs.entries == rhs.entries && lhs.fallback == rhs.fallback;
            } else if constexpr (std::is_same_v<T, SineSign>) {
                return lhs.omega == rhs.omega;
            } else {
                return lhs.bits == rhs.bits && (lhs.geometry == rhs.geometry || *lhs.geometry == *rhs.geometry);
            }
        },
        a.v_);
}

double dot(const Vector& w, const Vector& x) {
    if (w.size() != x.size()) {
        throw DomainMismatch("dimension mismatch: " + std::to_string(w.size()) + " vs " + std::to_string(x.size()));
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc = acc + w[k] * x[k];
    return acc;
}

int evaluate(const Hypothesis& h, const Instance& x) {
    return std::visit(
        [&](const auto& hyp) -> int {
            using T = std::decay_t<decltype(hyp)>;
            if constexpr (std::is_same_v<T, Halfspace>) {
                return dot(hyp.w, as_vector(x, "halfspace")) >= 0.0 ? 1 : -1;
            } else if constexpr (std::is_same_v<T, SineSign>) {
                const Vector& v = as_vector(x, "sine-sign hypothesis");
                if (v.size() != 1) throw DomainMismatch("sine-sign hypothesis needs one-dimensional instances");
                return std::sin(hyp.omega * v[0]) >= 0.0 ? 1 : -1;
            } else if constexpr (std::is_same_v<T, TableHypothesis>) {
                return hyp.lookup(as_point(x, "table hypothesis"));
            } else {
                return hyp.geometry->label(hyp.bits, as_point(x, "construction hypothesis"));
            }
        },
        h.variant());
}

PointId ImageMap::apply(PointId z) const noexcept {
    const auto it =
        std::lower_bound(pairs.begin(), pairs.end(), z, [](const auto& e, PointId key) { return e.first < key; });
    return it != pairs.end() && it->first == z ? it->second : z;
}

Instance apply(const Perturbation& g, const Instance& x) {
    if (const auto* t = std::get_if<Translation>(&g)) {
        const Vector& v = as_vector(x, "translation");
        if (v.size() != t->delta.size()) throw DomainMismatch("translation dimension differs from instance");
        Vector out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] + t->delta[k];
        return out;
    }
    return std::get<ImageMap>(g).apply(as_point(x, "image map"));
}

FiniteAtoms::FiniteAtoms(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw ValidationError("finite adversary needs at least one atom");
    domain_ = std::holds_alternative<Translation>(atoms_.front().g) ? DomainKind::vector : DomainKind::point;
    Rational total;
    common_weight_ = atoms_.front().weight;
    for (auto& atom : atoms_) {
        if (!atom.weight.is_positive()) throw ValidationError("atom weights must be positive");
        total += atom.weight;
        if (atom.weight != *common_weight_) common_weight_.reset();
        if (auto* t = std::get_if<Translation>(&atom.g)) {
            if (domain_ != DomainKind::vector) throw ValidationError("adversary mixes translations and image maps");
            if (!dim_) dim_ = t->delta.size();
            if (t->delta.size() != *dim_) throw ValidationError("translations differ in dimension");
            for (const double c : t->delta) {
                if (!std::isfinite(c)) throw ValidationError("translation entries must be finite");
            }
        } else {
            if (domain_ != DomainKind::point) throw ValidationError("adversary mixes translations and image maps");
            auto& pairs = std::get<ImageMap>(atom.g).pairs;
            std::sort(pairs.begin(), pairs.end());
            for (std::size_t i = 1; i < pairs.size(); ++i) {
                if (pairs[i].first == pairs[i - 1].first) throw ValidationError("image map sends a point twice");
            }
        }
    }
    if (total != Rational(1)) throw ValidationError("atom weights sum to " + total.to_string() + ", not 1");
    if (domain_ == DomainKind::vector) {
        std::vector<Vector> deltas;
        deltas.reserve(atoms_.size());
        for (const auto& atom : atoms_) deltas.push_back(std::get<Translation>(atom.g).delta);
        translations_ = PointBlock::from_points(deltas, *dim_);
    }
}

FiniteAtoms FiniteAtoms::uniform_translations(std::vector<Vector> deltas) {
    const auto k = static_cast<std::int64_t>(deltas.size());
    if (k == 0) throw ValidationError("finite adversary needs at least one atom");
    std::vector<Atom> atoms;
    atoms.reserve(deltas.size());
    for (auto& d : deltas) atoms.push_back({Translation{std::move(d)}, Rational(1, k)});
    return FiniteAtoms(std::move(atoms));
}

void LpBall::validate() const {
    if (!(p >= 1.0)) throw ValidationError("ball norm order must be >= 1");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("ball radius must be positive and finite");
    if (n_mc < 1) throw ValidationError("ball needs at least one Monte Carlo draw");
}

Distribution Distribution::finite(Dataset points, std::vector<Rational> weights) {
    if (points.empty()) throw ValidationError("finite support is empty");
    if (points.size() != weights.size()) throw ValidationError("support and weight lists differ in length");
    validate_dataset(points);
    Rational total;
    for (const auto& w : weights) {
        if (!w.is_positive()) throw ValidationError("support weights must be positive");
        total += w;
    }
    if (total != Rational(1)) throw ValidationError("support weights sum to " + total.to_string() + ", not 1");
    return Distribution(FiniteSupport{std::move(points), std::move(weights)});
}

Distribution Distribution::uniform(Dataset points) {
    const auto n = static_cast<std::int64_t>(points.size());
    if (n == 0) throw ValidationError("finite support is empty");
    std::vector<Rational> weights(points.size(), Rational(1, n));
    return finite(std::move(points), std::move(weights));
}

Distribution Distribution::synthetic(SyntheticSpec spec) {
    if (spec.generator != "linear" && spec.generator != "interval") {
        throw ValidationError("unknown synthetic generator '" + spec.generator + "'");
    }
    if (spec.eval_samples == 0) throw ValidationError("synthetic distribution needs eval_samples >= 1");
    return Distribution(std::move(spec));
}

std::vector<std::size_t> sample_indices(const FiniteSupport& support, std::size_t n, Rng& rng) {
    std::int64_t common = 1;
    for (const auto& w : support.weights) common = checked_lcm(common, w.den());
    std::vector<std::uint64_t> cumulative;
    cumulative.reserve(support.weights.size());
    std::uint64_t running = 0;
    for (const auto& w : support.weights) {
        running += static_cast<std::uint64_t>(w.num()) * static_cast<std::uint64_t>(common / w.den());
        cumulative.push_back(running);
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, static_cast<std::uint64_t>(common) - 1);
    std::vector<std::size_t> out(n);
    for (auto& idx : out) {
        const std::uint64_t u = pick(rng);
        idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    }
    return out;
}

Dataset generate(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed) {
    const auto param = [&](const char* key, double fallback) {
        const auto it = spec.params.find(key);
        return it == spec.params.end() ? fallback : it->second;
    };
    Rng rng = make_rng(seed);
    Dataset out;
    out.reserve(n);
    if (spec.generator == "linear") {
        const auto d = static_cast<std::size_t>(param("d", 2));
        const double noise = param("noise", 0.1);
        const double margin = param("margin", 0.0);
        if (d == 0) throw ValidationError("linear generator needs d >= 1");
        std::normal_distribution<double> normal(0.0, 1.0);
        while (out.size() < n) {
            Vector x(d);
            for (auto& c : x) c = normal(rng);
            if (std::fabs(x[0]) <= margin) continue;
            int y = x[0] >= 0.0 ? 1 : -1;
            if (uniform01(rng) < noise) y = -y;
            out.push_back({std::move(x), y});
        }
    } else if (spec.generator == "interval") {
        const double positive = param("positive", 0.8);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = 2.0 * uniform01(rng) - 1.0;
            out.push_back({Vector{x}, uniform01(rng) < positive ? 1 : -1});
        }
    } else {
        throw ValidationError("unknown synthetic generator '" + spec.generator + "'");
    }
    return out;
}

Dataset sample(const Distribution& dist, std::size_t n, std::uint64_t seed) {
    if (const auto* support = dist.support()) {
        Rng rng = make_rng(seed);
        Dataset out;
        out.reserve(n);
        for (const std::size_t i : sample_indices(*support, n, rng)) out.push_back(support->points[i]);
        return out;
    }
    const auto& spec = std::get<SyntheticSpec>(dist.variant());
    return generate(spec, n, derive_seed(spec.seed, seed));
}

// ----------------------------------------------------------- margin engine

MarginEvaluator::MarginEvaluator(const Adversary& adv, const LabeledExample& ex, std::uint64_t seed)
    : adv_(&adv), ex_(&ex) {
    checked_label(ex.y);
    if (const auto* ball = adv.ball()) {
        const Vector& x = as_vector(ex.x, "l_p ball adversary");
        Rng rng = make_rng(derive_seed(ball->seed, seed));
        draws_ = sample_lp_ball(ball->n_mc, x.size(), ball->p, ball->gamma, rng);
    }
}

MarginStats MarginEvaluator::operator()(const Hypothesis& h) const {
    return std::visit(
        [&](const auto& a) -> MarginStats {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, FiniteAtoms>) {
                return atoms_margin(a, h);
            } else if constexpr (std::is_same_v<T, LpBall>) {
                return ball_margin(h);
            } else {
                return scaling_margin(h);
            }
        },
        adv_->variant());
}

MarginStats MarginEvaluator::atoms_margin(const FiniteAtoms& atoms, const Hypothesis& h) const {
    const std::size_t k = atoms.size();
    std::vector<std::uint8_t> flags(k, 0);
    std::size_t mistakes = 0;
    const auto* half = std::get_if<Halfspace>(&h.variant());
    if (half != nullptr && atoms.domain() == DomainKind::vector) {
        const Vector& x = as_vector(ex_->x, "halfspace");
        if (x.size() != half->w.size() || x.size() != *atoms.dimension()) {
            throw DomainMismatch("halfspace, instance and translations disagree on dimension");
        }
        std::vector<double> scores(k);
        simd::shifted_dots(atoms.translations().columns, k, x, half->w, scores);
        mistakes = simd::mark_mistakes(scores, ex_->y, flags);
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            flags[i] = evaluate(h, apply(atoms.atoms()[i].g, ex_->x)) != ex_->y ? 1 : 0;
            mistakes += flags[i];
        }
    }
    Rational mass;
    if (const auto& w = atoms.common_weight()) {
        mass = *w * Rational(static_cast<std::int64_t>(mistakes));
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            if (flags[i]) mass += atoms.atoms()[i].weight;
        }
    }
    MarginStats out;
    out.margin = (Rational(1) - mass * Rational(2)).to_double();
    out.exact_mistake = mass;
    out.any_mistake = mistakes > 0;
    return out;
}

MarginStats MarginEvaluator::ball_margin(const Hypothesis& h) const {
    const Vector& x = as_vector(ex_->x, "l_p ball adversary");
    const std::size_t n = draws_.n;
    std::size_t mistakes = 0;
    if (const auto* half = std::get_if<Halfspace>(&h.variant())) {
        if (half->w.size() != x.size()) throw DomainMismatch("halfspace and instance disagree on dimension");
        std::vector<double> scores(n);
        simd::shifted_dots(draws_.columns, n, x, half->w, scores);
        mistakes = simd::mark_mistakes(scores, ex_->y, {});
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            Vector moved(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) moved[k] = x[k] + draws_.at(j, k);
            mistakes += evaluate(h, moved) != ex_->y ? 1 : 0;
        }
    }
    MarginStats out;
    out.margin = clamp_margin(static_cast<double>(static_cast<long long>(n) - 2 * static_cast<long long>(mistakes)) /
                              static_cast<double>(n));
    out.draws = n;
    return out;
}

MarginStats MarginEvaluator::scaling_margin(const Hypothesis& h) const {
    const Vector& x = as_vector(ex_->x, "uniform scaling adversary");
    // Nodes +-c_k with c_k = (k + 1/2) / N. Both classes this adversary is
    // used with are odd in c away from zero, so every antithetic pair
    // contributes exactly what the continuous expectation would.
    std::size_t mistakes = 0;
    Vector scaled(x.size());
    for (std::size_t k = 0; k < scaling_nodes; ++k) {
        const double c = (static_cast<double>(k) + 0.5) / static_cast<double>(scaling_nodes);
        for (const double s : {c, -c}) {
            for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = s * x[i];
            mistakes += evaluate(h, scaled) != ex_->y ? 1 : 0;
        }
    }
    const auto total = static_cast<std::int64_t>(2 * scaling_nodes);
    const Rational mass(static_cast<std::int64_t>(mistakes), total);
    MarginStats out;
    out.margin = (Rational(1) - mass * Rational(2)).to_double();
    out.exact_mistake = mass;
    out.any_mistake = mistakes > 0;
    return out;
}

MarginStats margin_stats(const Hypothesis& h, const Adversary& adv, const LabeledExample& ex, std::uint64_t seed) {
    return MarginEvaluator(adv, ex, seed)(h);
}

double smoothed_margin(const Hypothesis& h, const Adversary& adv, const LabeledExample& ex, std::uint64_t seed) {
    return margin_stats(h, adv, ex, seed).margin;
}

double prob_mistake(const Hypothesis& h, const Adversary& adv, const LabeledExample& ex, std::uint64_t seed) {
    return margin_stats(h, adv, ex, seed).prob_mistake();
}

}  // namespace probrobust
