#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "specreg/dense_matrix.hpp"
#include "specreg/singular_system.hpp"
#include "specreg/stochastics.hpp"

namespace specreg {

enum class ParadigmKind { mse, prox, post, adv, sc, pseudo_inverse, truncated_svd };

struct Paradigm {
    ParadigmKind kind = ParadigmKind::mse;
    /// Penalty weight for adv / sc.
    double beta = 0.0;
    /// Retained modes for truncated_svd.
    std::size_t k = 0;

    static Paradigm mse() { return {ParadigmKind::mse}; }
    static Paradigm prox() { return {ParadigmKind::prox}; }
    static Paradigm post() { return {ParadigmKind::post}; }
    static Paradigm adv(double beta = 3.0 / 8.0) { return {ParadigmKind::adv, beta}; }
    static Paradigm sc(double beta = 1.0 / 8.0) { return {ParadigmKind::sc, beta}; }
    static Paradigm pseudo_inverse() { return {ParadigmKind::pseudo_inverse}; }
    static Paradigm truncated_svd(std::size_t k) { return {ParadigmKind::truncated_svd, 0.0, k}; }

    /// "mse", "adv(0.375)", "tsvd(12)", ...; parse_paradigm inverts it.
    std::string name() const;
    /// True when the training noise lives in X (Delta~).
    bool trains_in_x() const noexcept { return kind == ParadigmKind::prox || kind == ParadigmKind::post; }

    friend bool operator==(const Paradigm&, const Paradigm&) = default;
};

/// Accepts mse, prox, post, adv, adv(b), sc, sc(b), pinv, tsvd(k).
/// Throws InvalidArgument on unknown names or invalid parameters.
Paradigm parse_paradigm(const std::string& text);

/// Spectral reconstruction coefficients R(y; g) = sum_n g_n <y, v_n> u_n,
/// together with the equivalent Tikhonov weights g_n = sigma_n / (sigma_n^2 + lambda_n).
struct Filter {
    std::vector<double> sigma;
    std::vector<double> g;
    std::vector<double> lambda;
    Paradigm paradigm;
    std::string training_reference;
    /// 1-based modes where a 0/0 was resolved to the noiseless limit.
    std::vector<std::size_t> flagged_modes;

    std::size_t size() const noexcept { return g.size(); }
    double sup_g() const;
};

/// Spectral denoiser D x = sum_n d_n <x, u_n> u_n, d_n = 1 / (1 + lambda_n).
struct Denoiser {
    std::vector<double> d;
    std::vector<double> lambda;
    std::string training_reference;
};

/// lambda_n = Delta_n / Pi_n. Throws AssumptionError if some Pi_n = 0.
Filter fit_mse(std::span<const double> sigma, const SpectrumProfile& delta, const SpectrumProfile& pi);
/// lambda_n = Delta~_n / Pi_n with the noise added in X.
Filter fit_prox(std::span<const double> sigma, const SpectrumProfile& delta_tilde,
                const SpectrumProfile& pi);
/// Denoiser after the pseudo-inverse: lambda_n = sigma_n^2 Delta~_n / Pi_n.
Filter fit_post(std::span<const double> sigma, const SpectrumProfile& delta_tilde,
                const SpectrumProfile& pi);
/// Gradient-penalty adversarial weights
/// lambda_n = 3/(8 beta) * Delta_n / (3 sigma_n^2 Pi_n + Delta_n).
Filter fit_adv(std::span<const double> sigma, const SpectrumProfile& delta, const SpectrumProfile& pi,
               double beta = 3.0 / 8.0);
/// Source-condition adversarial weights lambda_n = Delta_n / (8 beta Pi_n).
Filter fit_sc(std::span<const double> sigma, const SpectrumProfile& delta, const SpectrumProfile& pi,
              double beta = 1.0 / 8.0);

Denoiser fit_denoiser(const SpectrumProfile& delta_tilde, const SpectrumProfile& pi);

Filter pseudo_inverse_filter(std::span<const double> sigma);
/// 1/sigma_n for n <= k, 0 beyond (lambda_n = +inf there).
Filter truncated_svd_filter(std::span<const double> sigma, std::size_t k);

/// Dispatch on the paradigm. `training` is Delta (Y-side) or Delta~ (X-side)
/// as the paradigm requires; it is ignored for pinv / tsvd.
Filter fit_filter(const Paradigm& paradigm, std::span<const double> sigma,
                  const SpectrumProfile& training, const SpectrumProfile& pi);

/// sum_n g_n <y, v_n> u_n
Vector reconstruct(std::span<const double> y, const Filter& f, const SingularSystem& sys);

/// sum_n d_n <x, u_n> u_n. Components of x outside span{u_n} are annihilated:
/// the spectral denoiser is only defined on N(A)^perp.
Vector denoise(std::span<const double> x, const Denoiser& d, const SingularSystem& sys);

/// All lambda_n <= 1/2, the condition under which J_lambda counts as
/// 1-Lipschitz in the adversarial derivation.
bool lipschitz_condition_holds(const Filter& f);

}  // namespace specreg
