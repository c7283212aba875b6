#include "specreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "specreg/error.hpp"

namespace specreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw DimensionError(std::string(what) + " has " + std::to_string(got) + " modes, expected " +
                             std::to_string(want));
}

ErrorReport accumulate(const Filter& f, std::span<const double> energy, const SpectrumProfile& delta_test) {
    require_size(delta_test.size(), f.size(), "test noise profile");
    ErrorReport r;
    r.per_mode.resize(f.size());
    for (std::size_t n = 0; n < f.size(); ++n) {
        const double residual = 1.0 - f.sigma[n] * f.g[n];
        r.per_mode[n].data = residual * residual * energy[n];
        r.per_mode[n].noise = f.g[n] * f.g[n] * delta_test[n];
        r.data_term += r.per_mode[n].data;
        r.noise_term += r.per_mode[n].noise;
    }
    r.total = r.data_term + r.noise_term;
    return r;
}

}  // namespace

ErrorReport expected_error_coefficients(const Filter& f, std::span<const double> x_coeffs,
                                        const SpectrumProfile& delta_test) {
    require_size(x_coeffs.size(), f.size(), "ground-truth coefficient vector");
    std::vector<double> energy(x_coeffs.size());
    for (std::size_t n = 0; n < energy.size(); ++n) energy[n] = x_coeffs[n] * x_coeffs[n];
    return accumulate(f, energy, delta_test);
}

ErrorReport expected_error(const Filter& f, const SingularSystem& sys, std::span<const double> x,
                           const SpectrumProfile& delta_test) {
    require_size(f.size(), sys.n_modes(), "filter");
    return expected_error_coefficients(f, x_coefficients(sys, x), delta_test);
}

ErrorReport expected_error(const Filter& f, const SpectrumProfile& pi, const SpectrumProfile& delta_test) {
    require_size(pi.size(), f.size(), "data profile");
    return accumulate(f, pi.values, delta_test);
}

double bias(const Filter& f, const SpectrumProfile& pi) {
    require_size(pi.size(), f.size(), "data profile");
    double e0 = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) {
        const double l = f.lambda[n];
        const double ratio = std::isinf(l) ? 1.0 : l / (f.sigma[n] * f.sigma[n] + l);
        e0 += ratio * ratio * pi[n];
    }
    return e0;
}

NoiseBound noise_error_bound(std::span<const double> sigma, const SpectrumProfile& delta_test) {
    require_size(delta_test.size(), sigma.size(), "test noise profile");
    NoiseBound b;
    double inv_sq = 0.0;
    for (std::size_t n = 0; n < sigma.size(); ++n) {
        const double s2 = sigma[n] * sigma[n];
        b.spectral_sum += delta_test[n] / s2;
        inv_sq += 1.0 / s2;
    }
    const double level = noise_level(delta_test);
    b.level_bound = level * level * inv_sq;
    return b;
}

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("fit_loglog_slope: length mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    SlopeFit fit;
    fit.points = lx.size();
    if (lx.size() < 2) return fit;
    const double k = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    if (lx.size() > 2) {
        const double intercept = my - fit.slope * mx;
        double rss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double e = ly[i] - intercept - fit.slope * lx[i];
            rss += e * e;
        }
        fit.standard_error = std::sqrt(rss / (k - 2.0) / sxx);
    }
    return fit;
}

SeriesVerdict series_verdict(std::span<const double> terms) {
    SeriesVerdict v;
    for (double t : terms) v.partial_sum += t;
    const std::size_t N = terms.size();
    const std::size_t start = N / 2;
    std::vector<double> idx, vals;
    for (std::size_t n = start; n < N; ++n) {
        idx.push_back(static_cast<double>(n + 1));
        vals.push_back(terms[n]);
    }
    const SlopeFit fit = fit_loglog_slope(idx, vals);
    if (fit.points < 2) {
        // Tail identically zero (or too short to fit): nothing diverges.
        v.decay_exponent = kInf;
        v.divergent = false;
        return v;
    }
    v.decay_exponent = -fit.slope;
    constexpr double kZ95 = 1.6448536269514722;  // one-sided 95% normal quantile
    v.divergent = v.decay_exponent + kZ95 * fit.standard_error <= 1.0 + 1e-9;
    return v;
}

SeriesVerdict w1_lower_bound(const SpectrumProfile& delta_mu, std::span<const double> sigma,
                             std::size_t n_cut) {
    require_size(delta_mu.size(), sigma.size(), "training noise profile");
    if (n_cut > sigma.size()) throw InvalidArgument("w1_lower_bound: n_cut exceeds n_modes");
    std::vector<double> terms(n_cut);
    for (std::size_t n = 0; n < n_cut; ++n) terms[n] = delta_mu[n] / (2.0 * sigma[n] * sigma[n]);
    return series_verdict(terms);
}

ConditionId parse_condition_id(std::string_view text) {
    if (text == "continuity") return ConditionId::continuity;
    if (text == "convergence") return ConditionId::convergence;
    throw InvalidArgument("unknown condition_id '" + std::string(text) + "'");
}

std::string to_string(ConditionId id) {
    return id == ConditionId::continuity ? "continuity" : "convergence";
}

namespace {

struct RatioVerdict {
    bool holds = false;
    double witness = 0.0;
    double exponent = 0.0;
};

// Ratios equal to +inf (zero denominator) satisfy the inequality trivially and
// are left out of the witness and the slope fit.
RatioVerdict judge_ratio(std::span<const double> ratio, double slope_tolerance) {
    RatioVerdict v;
    v.witness = kInf;
    for (double r : ratio)
        if (!std::isinf(r)) v.witness = std::min(v.witness, r);
    const std::size_t N = ratio.size();
    std::vector<double> idx, vals;
    bool zero_in_tail = false;
    for (std::size_t n = N / 2; n < N; ++n) {
        if (std::isinf(ratio[n])) continue;
        if (ratio[n] <= 0.0) zero_in_tail = true;
        idx.push_back(static_cast<double>(n + 1));
        vals.push_back(ratio[n]);
    }
    const SlopeFit fit = fit_loglog_slope(idx, vals);
    v.exponent = fit.slope;
    v.holds = v.witness > 0.0 && !zero_in_tail && (fit.points < 2 || fit.slope >= -slope_tolerance);
    return v;
}

double safe_ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
    return num / den;
}

}  // namespace

ConditionReport check_condition(const Paradigm& paradigm, ConditionId id, const ConditionInputs& in) {
    if (in.pi == nullptr || in.training == nullptr)
        throw InvalidArgument("check_condition: data and training profiles are required");
    const std::size_t N = in.sigma.size();
    require_size(in.pi->size(), N, "data profile");
    require_size(in.training->size(), N, "training noise profile");
    if (id == ConditionId::convergence) {
        if (in.test == nullptr) throw InvalidArgument("check_condition: convergence needs a test profile");
        require_size(in.test->size(), N, "test noise profile");
    }
    const auto& sigma = in.sigma;
    const auto& pi = *in.pi;
    const auto& mu = *in.training;

    ConditionReport report;
    report.paradigm = paradigm.name();
    report.condition_id = to_string(id);

    std::vector<double> ratio(N);
    switch (paradigm.kind) {
        case ParadigmKind::mse:
        case ParadigmKind::sc:
        case ParadigmKind::prox:
            for (std::size_t n = 0; n < N; ++n)
                ratio[n] = id == ConditionId::continuity ? safe_ratio(mu[n], sigma[n] * pi[n])
                                                         : safe_ratio(mu[n], (*in.test)[n]);
            break;
        case ParadigmKind::post:
            for (std::size_t n = 0; n < N; ++n)
                ratio[n] = id == ConditionId::continuity ? safe_ratio(sigma[n] * mu[n], pi[n])
                                                         : safe_ratio(mu[n] * mu[n], (*in.test)[n]);
            break;
        case ParadigmKind::adv:
            for (std::size_t n = 0; n < N; ++n)
                ratio[n] = id == ConditionId::continuity
                               ? safe_ratio(mu[n], sigma[n] * sigma[n] * sigma[n] * pi[n])
                               : safe_ratio(mu[n] * mu[n], (*in.test)[n]);
            break;
        case ParadigmKind::pseudo_inverse:
        case ParadigmKind::truncated_svd:
            throw InvalidArgument("check_condition: no condition row for " + paradigm.name());
    }

    const RatioVerdict main = judge_ratio(ratio, in.slope_tolerance);
    report.witness = main.witness;
    report.asymptotic_exponent = main.exponent;
    report.holds = main.holds;

    if (id == ConditionId::convergence && paradigm.kind == ParadigmKind::post) {
        std::vector<double> side(N);
        for (std::size_t n = 0; n < N; ++n) side[n] = safe_ratio(sigma[n] * sigma[n], pi[n]);
        const RatioVerdict sv = judge_ratio(side, in.slope_tolerance);
        report.side_conditions.push_back({"sigma_n^2 >= c Pi_n", sv.holds, sv.witness, sv.exponent});
        report.holds = report.holds && sv.holds;
    }
    if (id == ConditionId::convergence && paradigm.kind == ParadigmKind::adv) {
        std::vector<double> terms(N);
        for (std::size_t n = 0; n < N; ++n) terms[n] = sigma[n] * sigma[n];
        const SeriesVerdict sv = series_verdict(terms);
        report.side_conditions.push_back(
            {"sum sigma_n^2 < inf", !sv.divergent, sv.partial_sum, -sv.decay_exponent});
        report.holds = report.holds && !sv.divergent;
    }
    return report;
}

namespace {

nlohmann::json number_or_null(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

std::string to_json(const ErrorReport& report) {
    nlohmann::json j;
    j["data_term"] = report.data_term;
    j["noise_term"] = report.noise_term;
    j["total"] = report.total;
    auto& modes = j["per_mode"] = nlohmann::json::array();
    for (const auto& m : report.per_mode) modes.push_back({{"data", m.data}, {"noise", m.noise}});
    return j.dump(2);
}

std::string to_json(const ConditionReport& report) {
    nlohmann::json j;
    j["paradigm"] = report.paradigm;
    j["condition_id"] = report.condition_id;
    j["holds"] = report.holds;
    j["witness"] = number_or_null(report.witness);
    j["asymptotic_exponent"] = number_or_null(report.asymptotic_exponent);
    auto& side = j["side_conditions"] = nlohmann::json::array();
    for (const auto& s : report.side_conditions)
        side.push_back({{"name", s.name},
                        {"holds", s.holds},
                        {"witness", number_or_null(s.witness)},
                        {"asymptotic_exponent", number_or_null(s.asymptotic_exponent)}});
    return j.dump(2);
}

}  // namespace specreg
