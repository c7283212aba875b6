#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specreg/dense_matrix.hpp"
#include "specreg/singular_system.hpp"

namespace specreg {

enum class ProfileFamily { white, power_law, explicit_values, empirical };

std::string to_string(ProfileFamily family);

/// Per-mode nonnegative variances (Pi_n, Delta_n, Delta~_n, ...).
struct SpectrumProfile {
    std::vector<double> values;
    ProfileFamily family = ProfileFamily::explicit_values;
    /// delta for white / power_law.
    double level = 0.0;
    /// r in delta^2 n^-r for power_law.
    double exponent = 0.0;
    /// Number of samples behind an empirical profile.
    std::size_t sample_count = 0;
    /// 1-based modes whose estimated variance is exactly zero.
    std::vector<std::size_t> zero_modes;

    static SpectrumProfile white(double delta, std::size_t n_modes);
    /// values_n = delta^2 n^-r
    static SpectrumProfile power_law(double delta, double r, std::size_t n_modes);
    /// values_n = n^-p, the analytic data law.
    static SpectrumProfile decay(double p, std::size_t n_modes);
    static SpectrumProfile from_values(std::vector<double> values);

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t n) const { return values[n]; }

    /// Copy with every value multiplied by `factor` (family metadata kept consistent).
    SpectrumProfile scaled(double factor) const;

    /// Throws InvalidArgument on negative or non-finite values.
    void validate() const;
};

enum class NoiseSide {
    /// Noise in X, expanded in u_n (Delta~_n).
    x_side,
    /// Noise in Y, expanded in v_n (Delta_n).
    y_side,
};

/// Zero-mean Gaussian noise with covariance diagonal in a singular basis.
struct NoiseModel {
    SpectrumProfile profile;
    NoiseSide side = NoiseSide::y_side;
    /// Set for a-priori training rules: Delta_n >= delta^2 * n^-lower_bound_exponent.
    std::optional<double> lower_bound_exponent;

    /// The rule's lower-bound function l(n), 1-based n. Requires lower_bound_exponent.
    double lower_bound(std::size_t n) const;
};

/// Distribution of ground truths, summarized by Pi_n.
struct DataModel {
    SpectrumProfile pi;

    static DataModel power_law(double q, std::size_t n_modes);
    /// Throws AssumptionError at the first mode with Pi_n <= 0.
    void require_positive() const;
};

/// sqrt(max_n values_n).
double noise_level(const SpectrumProfile& profile);
double noise_level(const NoiseModel& model);

/// eps = sum_n sqrt(values_n) xi_n b_n with b_n = v_n (Y-side) or u_n (X-side),
/// xi_n drawn from the counter stream (seed, noise, index).
Vector sample_noise(const NoiseModel& model, const SingularSystem& sys, std::uint64_t seed,
                    std::uint64_t index = 0);

/// Per-mode coefficients of one noise draw: sqrt(values_n) xi_n.
Vector sample_noise_coefficients(const SpectrumProfile& profile, std::uint64_t seed,
                                 std::uint64_t index = 0);

/// values_n = (1/M) sum_i <s_i, b_n>^2, raw second moments.
SpectrumProfile estimate_profile(std::span<const Vector> samples, const ColumnSet& basis);

enum class TrainingFamily { white, power_law };

/// A-priori training noise at level delta: white gives Delta_n = delta^2,
/// power_law gives Delta_n = delta^2 n^-r. l(n) = n^-r is recorded.
NoiseModel training_noise_rule(double delta, TrainingFamily family, double r, std::size_t n_modes,
                               NoiseSide side = NoiseSide::y_side);

}  // namespace specreg
