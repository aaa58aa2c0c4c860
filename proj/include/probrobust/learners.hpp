#pragma once

#include "probrobust/core.hpp"
#include "probrobust/losses.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace probrobust {

struct ExplicitClass {
    std::vector<Hypothesis> members;
};

/// Unit-normalized halfspace directions (to within 1e-12), duplicates removed.
struct HalfspaceGrid {
    std::size_t dim = 0;
    std::vector<Vector> directions;
};

struct SineGrid {
    std::vector<double> omegas;
};

/// All h_b for a geometry, or only those with exactly `weight` ones. Members
/// are ordered by the integer value of the mask and produced on demand.
struct ConstructionClass {
    std::shared_ptr<const ConstructionGeometry> geometry;
    std::optional<std::size_t> weight;
};

class HypothesisClass {
public:
    using Variant = std::variant<ExplicitClass, HalfspaceGrid, SineGrid, ConstructionClass>;

    static HypothesisClass explicit_list(std::vector<Hypothesis> members);
    /// `count` distinct random unit directions drawn from `seed`.
    static HypothesisClass halfspace_grid(std::size_t dim, std::size_t count, std::uint64_t seed);
    static HypothesisClass halfspace_grid(std::vector<Vector> directions);
    static HypothesisClass sine_grid(std::vector<double> omegas);
    static HypothesisClass construction(std::shared_ptr<const ConstructionGeometry> geometry,
                                        std::optional<std::size_t> weight = std::nullopt);

    [[nodiscard]] const Variant& variant() const noexcept { return v_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] DomainKind domain() const noexcept;
    [[nodiscard]] Hypothesis member(std::size_t index) const;
    [[nodiscard]] std::vector<Hypothesis> members() const;
    /// Index of a member equal to h, if any.
    [[nodiscard]] std::optional<std::size_t> index_of(const Hypothesis& h) const;

private:
    HypothesisClass(Variant v, std::size_t size) : v_(std::move(v)), size_(size) {}
    Variant v_;
    std::size_t size_;
};

/// Default 1e6 hypothesis-example evaluations; PROBROBUST_BUDGET overrides.
[[nodiscard]] std::size_t default_budget();

/// Example-major table of pointwise losses: value(i, j) is the loss of class
/// member j on example i.
struct LossMatrix {
    std::size_t examples = 0;
    std::size_t functions = 0;
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * functions + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values.data() + i * functions, functions};
    }
};

/// Throws BudgetExceeded when class size times dataset size exceeds `budget`
/// and EmptyDataset for no examples. Worst-case loss against an l_p ball is
/// served by the halfspace closed form; other classes get UnsupportedOperation.
[[nodiscard]] LossMatrix loss_matrix(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv,
                                     const Dataset& data, std::uint64_t seed, std::size_t jobs = 1,
                                     std::size_t budget = default_budget());

/// Column means, summed over examples in order (bit-equal to empirical_risk).
[[nodiscard]] std::vector<double> column_means(const LossMatrix& m);

enum class TieBreak { lowest_index, random };

struct ErmOptions {
    TieBreak tie = TieBreak::lowest_index;
    std::uint64_t tie_seed = 0;
    std::size_t jobs = 1;
    std::size_t budget = default_budget();
};

struct ErmResult {
    std::size_t index = 0;
    Hypothesis hypothesis;
    double empirical_risk = 0.0;
    std::size_t evaluations = 0;
};

/// Index of a minimizer of `risks` under the tie policy.
[[nodiscard]] std::size_t select_minimizer(const std::vector<double>& risks, TieBreak tie, std::uint64_t tie_seed);

[[nodiscard]] ErmResult erm(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv,
                            const Dataset& data, std::uint64_t seed, const ErmOptions& options = {});
[[nodiscard]] ErmResult rerm(const HypothesisClass& cls, const Adversary& adv, const Dataset& data,
                             std::uint64_t seed, const ErmOptions& options = {});
[[nodiscard]] ErmResult prerm(const Rational& rho, const HypothesisClass& cls, const Adversary& adv,
                              const Dataset& data, std::uint64_t seed, const ErmOptions& options = {});

/// Worst-case loss of sign(<w, .>) against every translation in the closed
/// l_p ball of radius gamma: 0 iff y <w, x> > gamma * ||w||_q with q dual to p.
[[nodiscard]] int halfspace_worst_loss(const Vector& w, const LabeledExample& ex, double p, double gamma);

}  // namespace probrobust
