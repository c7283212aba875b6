#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specreg/learners.hpp"
#include "specreg/singular_system.hpp"
#include "specreg/stochastics.hpp"

namespace specreg {

struct ModeError {
    double data = 0.0;
    double noise = 0.0;
};

/// Expected squared reconstruction error split into the noiseless part and
/// the noise part. total == data_term + noise_term.
struct ErrorReport {
    double data_term = 0.0;
    double noise_term = 0.0;
    double total = 0.0;
    std::vector<ModeError> per_mode;
};

/// Fixed ground truth given by its coefficients <x, u_n>:
/// data_n = (1 - sigma_n g_n)^2 <x,u_n>^2, noise_n = g_n^2 Delta_n(nu).
ErrorReport expected_error_coefficients(const Filter& f, std::span<const double> x_coeffs,
                                        const SpectrumProfile& delta_test);

/// Fixed x in X (its null-space part is not counted).
ErrorReport expected_error(const Filter& f, const SingularSystem& sys, std::span<const double> x,
                           const SpectrumProfile& delta_test);

/// Expectation over the data distribution: data_n = (1 - sigma_n g_n)^2 Pi_n.
ErrorReport expected_error(const Filter& f, const SpectrumProfile& pi, const SpectrumProfile& delta_test);

/// e_0 = sum_n (lambda_n / (sigma_n^2 + lambda_n))^2 Pi_n.
double bias(const Filter& f, const SpectrumProfile& pi);

struct NoiseBound {
    /// sum_n Delta_n / sigma_n^2
    double spectral_sum = 0.0;
    /// delta(nu)^2 * sum_n sigma_n^-2
    double level_bound = 0.0;
};

NoiseBound noise_error_bound(std::span<const double> sigma, const SpectrumProfile& delta_test);

/// Least-squares slope of log(y) against log(x). Pairs with a non-positive or
/// non-finite coordinate are skipped.
struct SlopeFit {
    double slope = 0.0;
    double standard_error = 0.0;
    std::size_t points = 0;
};
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

/// Terms fitted as n^-p over the last half of the sequence. The series is
/// declared divergent when the one-sided 95% upper bound on p is <= 1.
struct SeriesVerdict {
    double partial_sum = 0.0;
    double decay_exponent = 0.0;  // fitted p
    bool divergent = false;
};
SeriesVerdict series_verdict(std::span<const double> terms);

/// Partial sum of Delta_n(mu) / (2 sigma_n^2) for n <= n_cut and the
/// divergence verdict for its terms.
SeriesVerdict w1_lower_bound(const SpectrumProfile& delta_mu, std::span<const double> sigma,
                             std::size_t n_cut);

enum class ConditionId { continuity, convergence };

/// Throws InvalidArgument for anything but "continuity" / "convergence".
ConditionId parse_condition_id(std::string_view text);
std::string to_string(ConditionId id);

struct SideCondition {
    std::string name;
    bool holds = false;
    double witness = 0.0;
    double asymptotic_exponent = 0.0;
};

/// Verdict for one row of the continuity / convergence comparison.
///
/// `witness` is the minimum over modes of the defining ratio (finite
/// evidence); `asymptotic_exponent` is the fitted log-log slope of that ratio
/// over the last half of the modes (family-level verdict). `holds` requires a
/// positive witness and a slope >= -slope_tolerance, plus any side conditions.
struct ConditionReport {
    std::string paradigm;
    std::string condition_id;
    bool holds = false;
    double witness = 0.0;
    double asymptotic_exponent = 0.0;
    std::vector<SideCondition> side_conditions;
};

struct ConditionInputs {
    std::span<const double> sigma;
    const SpectrumProfile* pi = nullptr;
    /// Delta(mu) for mse / sc / adv, Delta~(mu) for prox / post.
    const SpectrumProfile* training = nullptr;
    /// Delta(nu), required for convergence.
    const SpectrumProfile* test = nullptr;
    double slope_tolerance = 0.05;
};

ConditionReport check_condition(const Paradigm& paradigm, ConditionId id, const ConditionInputs& in);

std::string to_json(const ErrorReport& report);
std::string to_json(const ConditionReport& report);

}  // namespace specreg
