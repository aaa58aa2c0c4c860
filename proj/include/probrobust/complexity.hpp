#pragma once

#include "probrobust/core.hpp"
#include "probrobust/learners.hpp"
#include "probrobust/losses.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace probrobust {

// ------------------------------------------------------------------ VC

/// Binary behaviors of F functions on n points; value(j, i) is 1 when
/// function j outputs +1 (or loss 1) on point i.
struct BehaviorMatrix {
    std::size_t points = 0;
    std::size_t functions = 0;
    std::vector<std::uint8_t> values;  // function-major

    [[nodiscard]] std::uint8_t at(std::size_t j, std::size_t i) const { return values[j * points + i]; }
};

[[nodiscard]] BehaviorMatrix behaviors(const HypothesisClass& cls, const std::vector<Instance>& points,
                                       std::size_t budget = default_budget());

/// Loss behaviors of a binary loss (worst-case or rho-threshold) on an exact
/// adversary. Throws ValidationError for any other loss.
[[nodiscard]] BehaviorMatrix loss_behaviors(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv,
                                            const Dataset& examples, std::uint64_t seed = 0,
                                            std::size_t budget = default_budget());

/// All 2^|subset| patterns appear among the functions.
[[nodiscard]] bool shattered(const BehaviorMatrix& b, std::span<const std::size_t> subset);

/// At most 20 points.
[[nodiscard]] bool shatter_check(const HypothesisClass& cls, const std::vector<Instance>& points);

struct VcResult {
    std::size_t dimension = 0;
    std::vector<std::size_t> witness;  // a shattered subset of that size
    std::size_t subsets_checked = 0;
};

/// Largest k <= cap with a shattered k-subset. Works level by level: a set
/// can only be shattered if all of its subsets are, so level k+1 candidates
/// are built from shattered k-sets only.
[[nodiscard]] VcResult vc_dimension(const BehaviorMatrix& b, std::size_t cap);
[[nodiscard]] VcResult vc_dimension(const HypothesisClass& cls, const std::vector<Instance>& domain, std::size_t cap);
[[nodiscard]] VcResult loss_class_vc(const LossSpec& spec, const HypothesisClass& cls, const Adversary& adv,
                                     const Dataset& examples, std::size_t cap, std::uint64_t seed = 0);

// ----------------------------------------------------------- Rademacher

struct RademacherEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 in exact mode
    std::size_t patterns = 0;
    bool exact = false;
};

inline constexpr std::size_t rademacher_exact_cap = 12;

/// E_sigma[max_j (1/n) sum_i sigma_i f_j(i)] over the example-major value
/// matrix. With `draws` unset all 2^n sign patterns are enumerated (n <= 12);
/// otherwise `draws` sign vectors are sampled from `seed`.
[[nodiscard]] RademacherEstimate empirical_rademacher(const LossMatrix& values, std::optional<std::size_t> draws,
                                                      std::uint64_t seed = 0);

/// sqrt(2 ln F / n), the finite-class bound for functions in [-1, 1].
[[nodiscard]] double massart_bound(std::size_t functions, std::size_t n);

// -------------------------------------------------------------- covers

/// Translation descriptors under the l_p distance ||d1 - d2||_p.
struct MetricSpaceSample {
    std::vector<Vector> elements;
    double p = 2.0;

    [[nodiscard]] double distance(std::size_t a, std::size_t b) const;
};

struct CoverResult {
    std::size_t size = 0;
    std::vector<std::size_t> centers;
};

/// Index-order scan; an element not within r of an open center opens one.
[[nodiscard]] CoverResult covering_number_greedy(const MetricSpaceSample& space, double r);
/// Minimum cover with centers from the element list (at most 20 elements).
[[nodiscard]] CoverResult covering_number_exact(const MetricSpaceSample& space, double r);
[[nodiscard]] bool is_cover(const MetricSpaceSample& space, double r, std::span<const std::size_t> centers);

// -------------------------------------------------------------- r-nice

struct RNiceFailure {
    std::size_t triple = 0;
    Vector kappa;
};

struct RNiceReport {
    std::size_t triples = 0;
    std::size_t excluded = 0;  // |<w, x + tau>| < 1e-9
    std::size_t passed = 0;
    double pass_fraction = 1.0;  // over non-excluded triples
    std::vector<RNiceFailure> failures;
    std::string note;
};

inline constexpr double degenerate_margin = 1e-9;

/// Unit-l_p vector u with <w, u> = ||w||_q.
[[nodiscard]] Vector dual_witness(const Vector& w, double p);

/// For each triple (w_t, x_t, tau_t) builds the center tau + c r u
/// (c = sign <w, x + tau>, u = dual_witness(w, p)) and probes `trials`
/// uniform perturbations kappa of the r-ball around it, plus the boundary
/// point that recovers tau itself.
[[nodiscard]] RNiceReport r_nice_check(const std::vector<Vector>& ws, const std::vector<Vector>& xs,
                                       const std::vector<Vector>& taus, double p, double r, std::size_t trials,
                                       std::uint64_t seed);

}  // namespace probrobust
