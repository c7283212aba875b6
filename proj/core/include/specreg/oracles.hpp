#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "specreg/learners.hpp"
#include "specreg/singular_system.hpp"
#include "specreg/stochastics.hpp"

namespace specreg {

/// Per-mode least-squares filter from (x, y) pairs:
/// g_n = sum_i <y_i,v_n><x_i,u_n> / sum_i <y_i,v_n>^2.
class ErmAccumulator {
public:
    explicit ErmAccumulator(std::size_t n_modes);

    /// Add one pair given in coefficient space (x in u_n, y in v_n).
    void add_coefficients(std::span<const double> x_coeffs, std::span<const double> y_coeffs);
    void add(std::span<const double> x, std::span<const double> y, const SingularSystem& sys);

    std::size_t pair_count() const noexcept { return pairs_; }

    /// Modes with zero measurement energy get g_n = 0 and are listed in
    /// flagged_modes (1-based). Throws InvalidArgument without any pair.
    Filter finish(std::span<const double> sigma) const;

private:
    std::vector<double> cross_;
    std::vector<double> energy_;
    std::size_t pairs_ = 0;
};

struct SamplePair {
    Vector x;
    Vector y;
};

Filter erm_oracle(std::span<const SamplePair> pairs, const SingularSystem& sys);

enum class ObjectiveKind { adv, sc };

/// Per-mode scalar objective f(lambda) = a lambda^2 - b lambda.
///
/// adv: a = 4 beta (Pi + Delta / (3 sigma^2)), b = Delta / sigma^2.
/// sc:  a = 4 beta Pi / sigma^2,               b = Delta / sigma^2.
struct ScalarObjective {
    ObjectiveKind kind = ObjectiveKind::adv;
    double beta = 3.0 / 8.0;
    double sigma = 1.0;
    double pi = 1.0;
    double delta = 0.0;

    double quadratic() const;
    double linear() const;
    double value(double lambda) const;
    double derivative(double lambda) const;
};

struct SearchInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Upper end for the adv search: the closed form never exceeds 3 / (8 beta).
SearchInterval adv_interval(double beta);

/// Grows [0, h] by doubling h (from `start`) until the objective's slope at h
/// is non-negative. Throws NumericalError after 2000 doublings.
SearchInterval bracket_minimum(const ScalarObjective& objective, double start = 1.0);

/// Golden-section minimizer on `interval`, at most 200 iterations, stopping
/// once the bracket is narrower than tol. Throws InvalidArgument for tol <= 0
/// and for intervals whose end slopes show the minimum lies outside.
double scalar_objective_oracle(const ScalarObjective& objective, SearchInterval interval,
                               double tol = 1e-10);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t draws = 0;
};

/// Sample mean of ||R(A x + eps) - x||^2 over `draws` noise draws from the
/// counter streams (seed, noise, first_index + i), computed in the original
/// coordinates. Matches expected_error only for x in the row space.
MonteCarloEstimate monte_carlo_error(const Filter& f, const SingularSystem& sys, std::span<const double> x,
                                     const SpectrumProfile& delta_test, std::size_t draws, std::uint64_t seed,
                                     std::uint64_t first_index = 0);

}  // namespace specreg
