#include "specreg/oracles.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "specreg/error.hpp"

namespace specreg {

ErmAccumulator::ErmAccumulator(std::size_t n_modes) : cross_(n_modes, 0.0), energy_(n_modes, 0.0) {}

void ErmAccumulator::add_coefficients(std::span<const double> x_coeffs, std::span<const double> y_coeffs) {
    if (x_coeffs.size() != cross_.size() || y_coeffs.size() != cross_.size())
        throw DimensionError("erm: coefficient vectors must have " + std::to_string(cross_.size()) + " entries");
    for (std::size_t n = 0; n < cross_.size(); ++n) {
        cross_[n] += y_coeffs[n] * x_coeffs[n];
        energy_[n] += y_coeffs[n] * y_coeffs[n];
    }
    ++pairs_;
}

void ErmAccumulator::add(std::span<const double> x, std::span<const double> y, const SingularSystem& sys) {
    if (sys.n_modes() != cross_.size()) throw DimensionError("erm: system mode count differs");
    add_coefficients(x_coefficients(sys, x), y_coefficients(sys, y));
}

Filter ErmAccumulator::finish(std::span<const double> sigma) const {
    if (pairs_ == 0) throw InvalidArgument("erm: at least one (x, y) pair is required");
    if (sigma.size() != cross_.size()) throw DimensionError("erm: sigma length differs from mode count");
    Filter f;
    f.sigma.assign(sigma.begin(), sigma.end());
    f.g.resize(sigma.size());
    f.lambda.resize(sigma.size());
    f.paradigm = Paradigm::mse();
    f.training_reference = "erm(M=" + std::to_string(pairs_) + ")";
    for (std::size_t n = 0; n < sigma.size(); ++n) {
        if (energy_[n] == 0.0) {
            f.g[n] = 0.0;
            f.flagged_modes.push_back(n + 1);
        } else {
            f.g[n] = cross_[n] / energy_[n];
        }
        f.lambda[n] = f.g[n] == 0.0 ? std::numeric_limits<double>::infinity()
                                    : sigma[n] / f.g[n] - sigma[n] * sigma[n];
    }
    return f;
}

Filter erm_oracle(std::span<const SamplePair> pairs, const SingularSystem& sys) {
    ErmAccumulator acc(sys.n_modes());
    for (const auto& p : pairs) acc.add(p.x, p.y, sys);
    return acc.finish(sys.sigma());
}

double ScalarObjective::quadratic() const {
    const double s2 = sigma * sigma;
    return kind == ObjectiveKind::adv ? 4.0 * beta * (pi + delta / (3.0 * s2)) : 4.0 * beta * pi / s2;
}

double ScalarObjective::linear() const { return delta / (sigma * sigma); }

double ScalarObjective::value(double lambda) const { return (quadratic() * lambda - linear()) * lambda; }

double ScalarObjective::derivative(double lambda) const { return 2.0 * quadratic() * lambda - linear(); }

SearchInterval adv_interval(double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("adv interval: beta must be > 0");
    return {0.0, 3.0 / (8.0 * beta)};
}

SearchInterval bracket_minimum(const ScalarObjective& objective, double start) {
    if (!(start > 0.0)) throw InvalidArgument("bracket_minimum: start must be > 0");
    double hi = start;
    for (int i = 0; i < 2000; ++i) {
        if (objective.derivative(hi) >= 0.0) return {0.0, hi};
        hi *= 2.0;
    }
    throw NumericalError("bracket_minimum: objective keeps decreasing");
}

double scalar_objective_oracle(const ScalarObjective& objective, SearchInterval interval, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("scalar objective oracle: tol must be > 0");
    if (!(interval.lo <= interval.hi)) throw InvalidArgument("scalar objective oracle: empty interval");
    if (objective.derivative(interval.lo) > 0.0 || objective.derivative(interval.hi) < 0.0)
        throw InvalidArgument("scalar objective oracle: interval does not bracket the minimizer");

    const double a = objective.quadratic();
    const double b = objective.linear();
    // f(x1) - f(x2) = (x1 - x2) (a (x1 + x2) - b); comparing through this
    // factorization avoids cancellation between two nearly equal values.
    auto first_is_lower = [&](double x1, double x2) { return (x1 - x2) * (a * (x1 + x2) - b) < 0.0; };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = interval.lo, hi = interval.hi;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        if (first_is_lower(x1, x2)) {
            hi = x2;
            x2 = x1;
            x1 = hi - inv_phi * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + inv_phi * (hi - lo);
        }
    }
    return 0.5 * (lo + hi);
}

MonteCarloEstimate monte_carlo_error(const Filter& f, const SingularSystem& sys, std::span<const double> x,
                                     const SpectrumProfile& delta_test, std::size_t draws, std::uint64_t seed,
                                     std::uint64_t first_index) {
    if (draws < 2) throw InvalidArgument("monte_carlo_error: need at least two draws");
    if (f.size() != sys.n_modes() || delta_test.size() != sys.n_modes())
        throw DimensionError("monte_carlo_error: filter / profile do not match the system");
    const Vector clean = apply_forward(sys, x);
    NoiseModel noise{delta_test, NoiseSide::y_side, std::nullopt};

    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        Vector y = sample_noise(noise, sys, seed, first_index + k);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += clean[i];
        const Vector rec = reconstruct(y, f, sys);
        double err = 0.0;
        for (std::size_t i = 0; i < rec.size(); ++i) err += (rec[i] - x[i]) * (rec[i] - x[i]);
        const double d = err - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (err - mean);
    }
    MonteCarloEstimate est;
    est.mean = mean;
    est.draws = draws;
    est.standard_error = std::sqrt(m2 / static_cast<double>(draws - 1) / static_cast<double>(draws));
    return est;
}

}  // namespace specreg
