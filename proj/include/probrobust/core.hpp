#pragma once

#include "probrobust/construction_geometry.hpp"
#include "probrobust/random.hpp"
#include "probrobust/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace probrobust {

// ---------------------------------------------------------------- instances

using Vector = std::vector<double>;

/// A point is either a real vector or an abstract identifier in a finite domain.
using Instance = std::variant<Vector, PointId>;

enum class DomainKind { vector, point };

[[nodiscard]] DomainKind domain_kind(const Instance& x) noexcept;
[[nodiscard]] const char* domain_name(DomainKind kind) noexcept;

/// Labels are the integers -1 and +1.
int checked_label(long long value);

struct LabeledExample {
    Instance x;
    int y = 1;
};

using Dataset = std::vector<LabeledExample>;

/// Throws ValidationError unless every label is +-1 and all instances share
/// one domain kind (and one dimension for vectors).
void validate_dataset(const Dataset& data);

// --------------------------------------------------------------- hypotheses

struct Halfspace {
    Vector w;
};

struct TableHypothesis {
    std::vector<std::pair<PointId, int>> entries;  // sorted by id, unique
    int fallback = 1;

    [[nodiscard]] int lookup(PointId id) const noexcept;
};

struct SineSign {
    double omega = 0.0;
};

struct ConstructionHypothesis {
    std::uint64_t bits = 0;
    std::shared_ptr<const ConstructionGeometry> geometry;
};

class Hypothesis {
public:
    using Variant = std::variant<Halfspace, TableHypothesis, SineSign, ConstructionHypothesis>;

    static Hypothesis halfspace(Vector w);
    static Hypothesis table(std::vector<std::pair<PointId, int>> entries, int fallback);
    static Hypothesis sine(double omega);
    static Hypothesis construction(std::uint64_t bits, std::shared_ptr<const ConstructionGeometry> geometry);

    [[nodiscard]] const Variant& variant() const noexcept { return v_; }
    [[nodiscard]] DomainKind domain() const noexcept;
    /// Vector dimension the hypothesis expects; nullopt for point domains.
    [[nodiscard]] std::optional<std::size_t> dimension() const noexcept;

    friend bool operator==(const Hypothesis& a, const Hypothesis& b);

private:
    explicit Hypothesis(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Halfspaces use sign(0) = +1; sine-sign uses sign(sin 0) = +1.
[[nodiscard]] int evaluate(const Hypothesis& h, const Instance& x);

/// <w, x> summed left to right; the same order the simd kernels use.
[[nodiscard]] double dot(const Vector& w, const Vector& x);

// -------------------------------------------------------------- adversaries

struct Translation {
    Vector delta;
};

/// Abstract per-point image table; points without an entry stay put.
struct ImageMap {
    std::vector<std::pair<PointId, PointId>> pairs;  // sorted by source, unique

    [[nodiscard]] PointId apply(PointId z) const noexcept;
};

using Perturbation = std::variant<Translation, ImageMap>;

[[nodiscard]] Instance apply(const Perturbation& g, const Instance& x);

struct Atom {
    Perturbation g;
    Rational weight;
};

/// Finite perturbation set with an exact probability on every member.
class FiniteAtoms {
public:
    /// Throws ValidationError unless the list is non-empty, every weight is
    /// positive, the weights sum to exactly 1 and all atoms have one kind.
    explicit FiniteAtoms(std::vector<Atom> atoms);

    [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
    [[nodiscard]] DomainKind domain() const noexcept { return domain_; }
    [[nodiscard]] std::optional<std::size_t> dimension() const noexcept { return dim_; }
    /// Column-major block of all translation vectors (vector domain only).
    [[nodiscard]] const PointBlock& translations() const noexcept { return translations_; }
    /// Set when all weights coincide; lets margin sums become one product.
    [[nodiscard]] const std::optional<Rational>& common_weight() const noexcept { return common_weight_; }

    static FiniteAtoms uniform_translations(std::vector<Vector> deltas);

private:
    std::vector<Atom> atoms_;
    DomainKind domain_ = DomainKind::vector;
    std::optional<std::size_t> dim_;
    PointBlock translations_;
    std::optional<Rational> common_weight_;
};

/// Translations drawn uniformly from the l_p ball of radius gamma. Margins are
/// Monte Carlo means over n_mc draws seeded from (seed, per-call seed).
struct LpBall {
    double p = 2.0;
    double gamma = 0.1;
    std::size_t n_mc = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

/// g_c(x) = c * x with c uniform on [-1, 1]; the smoothing used by the
/// infinite-VC sine example.
struct UniformScaling {};

class Adversary {
public:
    using Variant = std::variant<FiniteAtoms, LpBall, UniformScaling>;

    Adversary(FiniteAtoms atoms) : v_(std::move(atoms)) {}  // NOLINT(google-explicit-constructor)
    Adversary(LpBall ball) : v_((ball.validate(), ball)) {}  // NOLINT(google-explicit-constructor)
    Adversary(UniformScaling s) : v_(s) {}                   // NOLINT(google-explicit-constructor)

    [[nodiscard]] const Variant& variant() const noexcept { return v_; }
    [[nodiscard]] const FiniteAtoms* atoms() const noexcept { return std::get_if<FiniteAtoms>(&v_); }
    [[nodiscard]] const LpBall* ball() const noexcept { return std::get_if<LpBall>(&v_); }
    [[nodiscard]] bool is_exact() const noexcept { return !std::holds_alternative<LpBall>(v_); }

private:
    Variant v_;
};

// ------------------------------------------------------------ distributions

struct FiniteSupport {
    Dataset points;
    std::vector<Rational> weights;
};

/// Generator identifier plus numeric parameters; a pure function of
/// (params, seed). `eval_samples` is the declared sample count used when a
/// population risk must be estimated.
struct SyntheticSpec {
    std::string generator;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    std::size_t eval_samples = 10000;
};

class Distribution {
public:
    using Variant = std::variant<FiniteSupport, SyntheticSpec>;

    /// Throws ValidationError unless weights are positive and sum to exactly 1.
    static Distribution finite(Dataset points, std::vector<Rational> weights);
    static Distribution uniform(Dataset points);
    static Distribution synthetic(SyntheticSpec spec);

    [[nodiscard]] const Variant& variant() const noexcept { return v_; }
    [[nodiscard]] const FiniteSupport* support() const noexcept { return std::get_if<FiniteSupport>(&v_); }

private:
    explicit Distribution(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// n i.i.d. draws. Finite supports are sampled exactly: weights are put over a
/// common denominator and an integer in [0, lcm) picks the point.
[[nodiscard]] Dataset sample(const Distribution& dist, std::size_t n, std::uint64_t seed);
[[nodiscard]] std::vector<std::size_t> sample_indices(const FiniteSupport& support, std::size_t n, Rng& rng);

/// Generators: "linear" (params d, noise, margin) labels Gaussian points by a
/// fixed unit direction with label noise; "interval" (param positive) draws x
/// uniform on [-1, 1] labeled +1 with probability `positive`.
[[nodiscard]] Dataset generate(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed);

// ----------------------------------------------------------- margin engine

struct MarginStats {
    /// y * E[h(g(x))], clamped to [-1, 1].
    double margin = 1.0;
    /// Exact perturbation-mistake mass; available for exact adversaries.
    std::optional<Rational> exact_mistake;
    /// Whether some perturbation errs; available for exact adversaries.
    std::optional<bool> any_mistake;
    /// Monte Carlo draw count (0 for exact adversaries).
    std::size_t draws = 0;

    /// (1 - margin) / 2, computed from the same margin value.
    [[nodiscard]] double prob_mistake() const noexcept { return (1.0 - margin) / 2.0; }
};

/// Binds one (adversary, example, seed). For l_p balls the draws are taken
/// once here and shared by every hypothesis evaluated through this object,
/// so all losses of one example see the same perturbations.
class MarginEvaluator {
public:
    MarginEvaluator(const Adversary& adv, const LabeledExample& ex, std::uint64_t seed);

    [[nodiscard]] MarginStats operator()(const Hypothesis& h) const;
    [[nodiscard]] const LabeledExample& example() const noexcept { return *ex_; }

private:
    MarginStats atoms_margin(const FiniteAtoms& atoms, const Hypothesis& h) const;
    MarginStats ball_margin(const Hypothesis& h) const;
    MarginStats scaling_margin(const Hypothesis& h) const;

    const Adversary* adv_;
    const LabeledExample* ex_;
    PointBlock draws_;
};

/// Antithetic node count per side for the uniform-scaling expectation.
inline constexpr std::size_t scaling_nodes = 32;

[[nodiscard]] MarginStats margin_stats(const Hypothesis& h, const Adversary& adv, const LabeledExample& ex,
                                       std::uint64_t seed);
[[nodiscard]] double smoothed_margin(const Hypothesis& h, const Adversary& adv, const LabeledExample& ex,
                                     std::uint64_t seed);
[[nodiscard]] double prob_mistake(const Hypothesis& h, const Adversary& adv, const LabeledExample& ex,
                                  std::uint64_t seed);

/// Seed handed to example `index` of a dataset evaluated under `seed`.
[[nodiscard]] inline std::uint64_t example_seed(std::uint64_t seed, std::size_t index) noexcept {
    return seed ^ static_cast<std::uint64_t>(index);
}

}  // namespace probrobust
