#include "probrobust/losses.hpp"

#include "probrobust/errors.hpp"

#include <cmath>
#include <numbers>

namespace probrobust {
namespace {

bool in_unit_interval(const Rational& r, bool allow_zero) {
    return (allow_zero ? !r.is_negative() : r.is_positive()) && r < Rational(1);
}

Rational min_r(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational max_r(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace

LossSpec LossSpec::rho_threshold(Rational rho) {
    if (!in_unit_interval(rho, true)) throw ValidationError("rho must lie in [0, 1)");
    return LossSpec(RhoThresholdLoss{rho});
}

LossSpec LossSpec::ramp(Rational rho, Rational rho_star) {
    if (!in_unit_interval(rho, true) || !in_unit_interval(rho_star, true)) {
        throw ValidationError("ramp thresholds must lie in [0, 1)");
    }
    if (!(rho_star < rho)) throw ValidationError("ramp needs rho_star < rho strictly");
    return LossSpec(RampLoss{rho, rho_star});
}

LossSpec LossSpec::scaled_ramp(Rational rho) {
    if (!in_unit_interval(rho, false)) throw ValidationError("scaled ramp needs rho in (0, 1)");
    return LossSpec(ScaledRampLoss{rho});
}

LossSpec LossSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    const auto no_arg = [&](LossSpec s) {
        if (colon != std::string_view::npos) throw ParseError("loss '" + std::string(head) + "' takes no argument");
        return s;
    };
    const auto need_arg = [&] {
        if (arg.empty()) throw ParseError("loss '" + std::string(head) + "' needs an argument");
        return arg;
    };
    if (head == "worst") return no_arg(worst_case());
    if (head == "hinge") return no_arg(hinge());
    if (head == "squared") return no_arg(squared());
    if (head == "exp") return no_arg(exponential());
    if (head == "avg") return no_arg(linear_average());
    if (head == "rho") return rho_threshold(Rational::parse(need_arg()));
    if (head == "scaled") return scaled_ramp(Rational::parse(need_arg()));
    if (head == "ramp") {
        const std::string_view a = need_arg();
        const auto comma = a.find(',');
        if (comma == std::string_view::npos) throw ParseError("ramp loss is written ramp:RHO,RHO_STAR");
        return ramp(Rational::parse(a.substr(0, comma)), Rational::parse(a.substr(comma + 1)));
    }
    throw ParseError("unknown loss '" + std::string(text) +
                     "' (expected worst|rho:R|ramp:R,R*|hinge|squared|exp|avg|scaled:R)");
}

std::string LossSpec::to_string() const {
    return std::visit(
        [](const auto& l) -> std::string {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, WorstCaseLoss>) return "worst";
            else if constexpr (std::is_same_v<T, RhoThresholdLoss>) return "rho:" + l.rho.to_string();
            else if constexpr (std::is_same_v<T, RampLoss>) return "ramp:" + l.rho.to_string() + "," + l.rho_star.to_string();
            else if constexpr (std::is_same_v<T, HingeLoss>) return "hinge";
            else if constexpr (std::is_same_v<T, SquaredLoss>) return "squared";
            else if constexpr (std::is_same_v<T, ExponentialLoss>) return "exp";
            else if constexpr (std::is_same_v<T, LinearAverageLoss>) return "avg";
            else return "scaled:" + l.rho.to_string();
        },
        v_);
}

bool LossSpec::is_binary() const noexcept {
    return std::holds_alternative<WorstCaseLoss>(v_) || std::holds_alternative<RhoThresholdLoss>(v_);
}

double LossSpec::range() const noexcept {
    if (std::holds_alternative<HingeLoss>(v_)) return 2.0;
    if (std::holds_alternative<SquaredLoss>(v_)) return 4.0;
    if (std::holds_alternative<ExponentialLoss>(v_)) return std::numbers::e;
    return 1.0;
}

bool operator==(const LossSpec& a, const LossSpec& b) {
    return a.to_string() == b.to_string();
}

std::optional<Rational> exact_loss_from_margin(const LossSpec& spec, const MarginStats& stats) {
    if (!stats.exact_mistake) return std::nullopt;
    const Rational& p = *stats.exact_mistake;
    return std::visit(
        [&](const auto& l) -> std::optional<Rational> {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, WorstCaseLoss>) {
                return Rational(*stats.any_mistake ? 1 : 0);
            } else if constexpr (std::is_same_v<T, RhoThresholdLoss>) {
                return Rational(p > l.rho ? 1 : 0);
            } else if constexpr (std::is_same_v<T, RampLoss>) {
                return min_r(Rational(1), max_r(Rational(0), (p - l.rho_star) / (l.rho - l.rho_star)));
            } else if constexpr (std::is_same_v<T, LinearAverageLoss>) {
                return p;
            } else if constexpr (std::is_same_v<T, ScaledRampLoss>) {
                return min_r(p / l.rho, Rational(1));
            } else {
                return std::nullopt;
            }
        },
        spec.variant());
}

std::optional<double> loss_at_margin(const LossSpec& spec, double t) {
    const double p = (1.0 - t) / 2.0;
    return std::visit(
        [&](const auto& l) -> std::optional<double> {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, HingeLoss>) {
                return 1.0 - t;
            } else if constexpr (std::is_same_v<T, SquaredLoss>) {
                return (1.0 - t) * (1.0 - t);
            } else if constexpr (std::is_same_v<T, ExponentialLoss>) {
                return std::exp(-t);
            } else if constexpr (std::is_same_v<T, LinearAverageLoss>) {
                return p;
            } else if constexpr (std::is_same_v<T, RampLoss>) {
                const double lo = l.rho_star.to_double();
                return std::min(1.0, std::max(0.0, (p - lo) / (l.rho.to_double() - lo)));
            } else if constexpr (std::is_same_v<T, ScaledRampLoss>) {
                return std::min(p / l.rho.to_double(), 1.0);
            } else {
                return std::nullopt;
            }
        },
        spec.variant());
}

double loss_from_margin(const LossSpec& spec, const MarginStats& stats) {
    if (std::holds_alternative<LinearAverageLoss>(spec.variant())) return stats.prob_mistake();
    if (const auto exact = exact_loss_from_margin(spec, stats)) return exact->to_double();
    if (std::holds_alternative<WorstCaseLoss>(spec.variant())) {
        throw UnsupportedOperation(
            "worst-case loss is undefined on a sampled l_p ball; discretize the ball or use the halfspace closed form");
    }
    if (const auto* r = std::get_if<RhoThresholdLoss>(&spec.variant())) {
        return stats.prob_mistake() > r->rho.to_double() ? 1.0 : 0.0;
    }
    return *loss_at_margin(spec, stats.margin);
}

double pointwise_loss(const LossSpec& spec, const Hypothesis& h, const Adversary& adv, const LabeledExample& ex,
                      std::uint64_t seed) {
    if (std::holds_alternative<WorstCaseLoss>(spec.variant()) && adv.ball() != nullptr) {
        throw UnsupportedOperation(
            "worst-case loss is undefined on a sampled l_p ball; discretize the ball or use the halfspace closed form");
    }
    return loss_from_margin(spec, margin_stats(h, adv, ex, seed));
}

std::optional<double> lipschitz_constant(const LossSpec& spec) {
    return std::visit(
        [](const auto& l) -> std::optional<double> {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, HingeLoss>) return 1.0;
            else if constexpr (std::is_same_v<T, LinearAverageLoss>) return 0.5;
            else if constexpr (std::is_same_v<T, SquaredLoss>) return 4.0;
            else if constexpr (std::is_same_v<T, ExponentialLoss>) return std::numbers::e;
            else if constexpr (std::is_same_v<T, RampLoss>) return 1.0 / (2.0 * (l.rho - l.rho_star).to_double());
            else if constexpr (std::is_same_v<T, ScaledRampLoss>) return 1.0 / (2.0 * l.rho.to_double());
            else return std::nullopt;
        },
        spec.variant());
}

double empirical_risk(const LossSpec& spec, const Hypothesis& h, const Adversary& adv, const Dataset& data,
                      std::uint64_t seed) {
    if (data.empty()) throw EmptyDataset("empirical risk of an empty dataset");
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) sum += pointwise_loss(spec, h, adv, data[i], example_seed(seed, i));
    return sum / static_cast<double>(data.size());
}

std::optional<Rational> exact_population_risk(const LossSpec& spec, const Hypothesis& h, const Adversary& adv,
                                              const FiniteSupport& support, std::uint64_t seed) {
    if (!adv.is_exact() || std::holds_alternative<LinearAverageLoss>(spec.variant())) return std::nullopt;
    Rational total;
    for (std::size_t i = 0; i < support.points.size(); ++i) {
        const auto value = exact_loss_from_margin(spec, margin_stats(h, adv, support.points[i], example_seed(seed, i)));
        if (!value) return std::nullopt;
        if (!value->is_zero()) total += support.weights[i] * *value;
    }
    return total;
}

double population_risk(const LossSpec& spec, const Hypothesis& h, const Adversary& adv, const Distribution& dist,
                       std::uint64_t seed) {
    if (const auto* support = dist.support()) {
        if (spec.is_binary() && adv.is_exact()) {
            return exact_population_risk(spec, h, adv, *support, seed)->to_double();
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < support->points.size(); ++i) {
            sum += support->weights[i].to_double() *
                   pointwise_loss(spec, h, adv, support->points[i], example_seed(seed, i));
        }
        return sum;
    }
    const auto& spec_syn = std::get<SyntheticSpec>(dist.variant());
    const Dataset data = generate(spec_syn, spec_syn.eval_samples, derive_seed(spec_syn.seed, "population", 0));
    return empirical_risk(spec, h, adv, data, seed);
}

bool threshold_is_fragile(double prob_estimate, const Rational& rho, std::size_t draws) {
    if (draws == 0) return false;
    const double p = std::clamp(prob_estimate, 0.0, 1.0);
    const double se = std::sqrt(std::max(p * (1.0 - p), 0.25 / static_cast<double>(draws)) / static_cast<double>(draws));
    return std::fabs(p - rho.to_double()) <= 3.0 * se;
}

FiniteAtoms discretize(const LpBall& ball, std::size_t dim, double spacing) {
    ball.validate();
    if (dim == 0) throw ValidationError("grid dimension must be positive");
    if (!(spacing > 0.0)) throw ValidationError("grid spacing must be positive");
    const auto reach = static_cast<long long>(std::floor(ball.gamma / spacing));
    const long long side = 2 * reach + 1;
    long double count = std::pow(static_cast<long double>(side), static_cast<long double>(dim));
    if (count > 5e6L) throw BudgetExceeded("translation grid would exceed 5e6 points");
    std::vector<Vector> deltas;
    std::vector<long long> z(dim, -reach);
    for (;;) {
        Vector delta(dim);
        for (std::size_t k = 0; k < dim; ++k) delta[k] = spacing * static_cast<double>(z[k]);
        if (lp_norm(delta, ball.p) <= ball.gamma) deltas.push_back(std::move(delta));
        std::size_t k = 0;
        while (k < dim && z[k] == reach) z[k++] = -reach;
        if (k == dim) break;
        ++z[k];
    }
    return FiniteAtoms::uniform_translations(std::move(deltas));
}

}  // namespace probrobust
