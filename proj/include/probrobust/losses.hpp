#pragma once

#include "probrobust/core.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace probrobust {

struct WorstCaseLoss {};
struct RhoThresholdLoss {
    Rational rho;
};
struct RampLoss {
    Rational rho;
    Rational rho_star;
};
struct HingeLoss {};
struct SquaredLoss {};
struct ExponentialLoss {};
struct LinearAverageLoss {};
struct ScaledRampLoss {
    Rational rho;
};

class LossSpec {
public:
    using Variant = std::variant<WorstCaseLoss, RhoThresholdLoss, RampLoss, HingeLoss, SquaredLoss, ExponentialLoss,
                                 LinearAverageLoss, ScaledRampLoss>;

    static LossSpec worst_case() { return LossSpec(WorstCaseLoss{}); }
    /// rho in [0, 1).
    static LossSpec rho_threshold(Rational rho);
    /// 0 <= rho_star < rho < 1.
    static LossSpec ramp(Rational rho, Rational rho_star);
    static LossSpec hinge() { return LossSpec(HingeLoss{}); }
    static LossSpec squared() { return LossSpec(SquaredLoss{}); }
    static LossSpec exponential() { return LossSpec(ExponentialLoss{}); }
    static LossSpec linear_average() { return LossSpec(LinearAverageLoss{}); }
    /// rho in (0, 1).
    static LossSpec scaled_ramp(Rational rho);

    /// worst | rho:R | ramp:R,R* | hinge | squared | exp | avg | scaled:R
    /// where R is `p/q` or a decimal exact with denominator <= 2^16.
    static LossSpec parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] const Variant& variant() const noexcept { return v_; }
    /// Takes only the values 0 and 1.
    [[nodiscard]] bool is_binary() const noexcept;
    /// Largest value on margins in [-1, 1] (squared loss reaches 4).
    [[nodiscard]] double range() const noexcept;

    friend bool operator==(const LossSpec& a, const LossSpec& b);

private:
    explicit LossSpec(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Loss of one example from its margin statistics. The worst-case loss needs
/// an exact adversary; on a sampled l_p ball it throws UnsupportedOperation.
[[nodiscard]] double loss_from_margin(const LossSpec& spec, const MarginStats& stats);

/// Exact value for the losses that are rational functions of the mistake
/// mass (worst, rho, ramp, scaled). nullopt when the adversary is sampled or
/// the loss is transcendental.
[[nodiscard]] std::optional<Rational> exact_loss_from_margin(const LossSpec& spec, const MarginStats& stats);

/// Value of a margin-Lipschitz loss at margin t; nullopt for the threshold
/// and worst-case losses.
[[nodiscard]] std::optional<double> loss_at_margin(const LossSpec& spec, double t);

[[nodiscard]] double pointwise_loss(const LossSpec& spec, const Hypothesis& h, const Adversary& adv,
                                    const LabeledExample& ex, std::uint64_t seed);

/// Lipschitz constant as a function of the margin on [-1, 1].
[[nodiscard]] std::optional<double> lipschitz_constant(const LossSpec& spec);

/// Mean pointwise loss; example i is evaluated with seed ^ i and the sum runs
/// left to right. Throws EmptyDataset.
[[nodiscard]] double empirical_risk(const LossSpec& spec, const Hypothesis& h, const Adversary& adv,
                                    const Dataset& data, std::uint64_t seed);

/// Finite support: exact weighted sum (rational when the loss and adversary
/// allow it). Synthetic: mean over the declared number of generated examples.
[[nodiscard]] double population_risk(const LossSpec& spec, const Hypothesis& h, const Adversary& adv,
                                     const Distribution& dist, std::uint64_t seed);

/// Exact population risk on a finite support, when every pointwise loss is
/// rational (see exact_loss_from_margin).
[[nodiscard]] std::optional<Rational> exact_population_risk(const LossSpec& spec, const Hypothesis& h,
                                                            const Adversary& adv, const FiniteSupport& support,
                                                            std::uint64_t seed);

/// True when a Monte Carlo estimate of the mistake probability lies within
/// three binomial standard errors of the threshold, so the indicator could
/// flip under a different seed.
[[nodiscard]] bool threshold_is_fragile(double prob_estimate, const Rational& rho, std::size_t draws);

/// Replaces a sampled ball by the uniform finite grid of translations
/// spacing * z (z integer) with ||spacing * z||_p <= gamma.
[[nodiscard]] FiniteAtoms discretize(const LpBall& ball, std::size_t dim, double spacing);

}  // namespace probrobust
