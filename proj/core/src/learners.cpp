#include "specreg/learners.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "specreg/error.hpp"

namespace specreg {

namespace {

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string describe(const SpectrumProfile& p) {
    std::string s = to_string(p.family);
    switch (p.family) {
        case ProfileFamily::white: s += "(level=" + format_number(p.level) + ")"; break;
        case ProfileFamily::power_law:
            s += "(level=" + format_number(p.level) + ",r=" + format_number(p.exponent) + ")";
            break;
        case ProfileFamily::empirical: s += "(M=" + std::to_string(p.sample_count) + ")"; break;
        case ProfileFamily::explicit_values: break;
    }
    return s;
}

void check_sizes(std::span<const double> sigma, const SpectrumProfile& noise, const SpectrumProfile& pi) {
    if (noise.size() != sigma.size() || pi.size() != sigma.size())
        throw DimensionError("profile lengths (" + std::to_string(noise.size()) + ", " +
                             std::to_string(pi.size()) + ") do not match n_modes " +
                             std::to_string(sigma.size()));
    noise.validate();
    pi.validate();
}

void require_positive_pi(const SpectrumProfile& pi) {
    for (std::size_t n = 0; n < pi.size(); ++n)
        if (!(pi[n] > 0.0)) throw AssumptionError(n + 1);
}

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be > 0");
}

Filter from_lambda(std::span<const double> sigma, std::vector<double> lambda, Paradigm paradigm,
                   std::string reference) {
    Filter f;
    f.sigma.assign(sigma.begin(), sigma.end());
    f.g.resize(sigma.size());
    for (std::size_t n = 0; n < sigma.size(); ++n) f.g[n] = sigma[n] / (sigma[n] * sigma[n] + lambda[n]);
    f.lambda = std::move(lambda);
    f.paradigm = paradigm;
    f.training_reference = std::move(reference);
    return f;
}

}  // namespace

std::string Paradigm::name() const {
    switch (kind) {
        case ParadigmKind::mse: return "mse";
        case ParadigmKind::prox: return "prox";
        case ParadigmKind::post: return "post";
        case ParadigmKind::adv: return "adv(" + format_number(beta) + ")";
        case ParadigmKind::sc: return "sc(" + format_number(beta) + ")";
        case ParadigmKind::pseudo_inverse: return "pinv";
        case ParadigmKind::truncated_svd: return "tsvd(" + std::to_string(k) + ")";
    }
    return "unknown";
}

Paradigm parse_paradigm(const std::string& text) {
    std::string head = text, arg;
    if (const auto open = text.find('('); open != std::string::npos) {
        if (text.back() != ')') throw InvalidArgument("malformed paradigm '" + text + "'");
        head = text.substr(0, open);
        arg = text.substr(open + 1, text.size() - open - 2);
    }
    auto number = [&]() {
        double v = 0.0;
        const auto res = std::from_chars(arg.data(), arg.data() + arg.size(), v);
        if (res.ec != std::errc{} || res.ptr != arg.data() + arg.size())
            throw InvalidArgument("malformed parameter in paradigm '" + text + "'");
        return v;
    };
    if (head == "mse" && arg.empty()) return Paradigm::mse();
    if (head == "prox" && arg.empty()) return Paradigm::prox();
    if (head == "post" && arg.empty()) return Paradigm::post();
    if (head == "pinv" && arg.empty()) return Paradigm::pseudo_inverse();
    if (head == "adv" || head == "sc") {
        const double beta = arg.empty() ? (head == "adv" ? 3.0 / 8.0 : 1.0 / 8.0) : number();
        check_beta(beta);
        return head == "adv" ? Paradigm::adv(beta) : Paradigm::sc(beta);
    }
    if (head == "tsvd" && !arg.empty()) {
        const double k = number();
        if (!(k >= 1.0) || k != std::floor(k)) throw InvalidArgument("tsvd(k) needs an integer k >= 1");
        return Paradigm::truncated_svd(static_cast<std::size_t>(k));
    }
    throw InvalidArgument("unknown paradigm '" + text + "'");
}

double Filter::sup_g() const {
    if (g.empty()) return 0.0;
    return *std::max_element(g.begin(), g.end());
}

Filter fit_mse(std::span<const double> sigma, const SpectrumProfile& delta, const SpectrumProfile& pi) {
    check_sizes(sigma, delta, pi);
    require_positive_pi(pi);
    std::vector<double> lambda(sigma.size());
    for (std::size_t n = 0; n < sigma.size(); ++n) lambda[n] = delta[n] / pi[n];
    return from_lambda(sigma, std::move(lambda), Paradigm::mse(),
                       "Delta(Y)=" + describe(delta) + "; Pi=" + describe(pi));
}

Filter fit_prox(std::span<const double> sigma, const SpectrumProfile& delta_tilde,
                const SpectrumProfile& pi) {
    check_sizes(sigma, delta_tilde, pi);
    require_positive_pi(pi);
    std::vector<double> lambda(sigma.size());
    for (std::size_t n = 0; n < sigma.size(); ++n) lambda[n] = delta_tilde[n] / pi[n];
    return from_lambda(sigma, std::move(lambda), Paradigm::prox(),
                       "Delta~(X)=" + describe(delta_tilde) + "; Pi=" + describe(pi));
}

Filter fit_post(std::span<const double> sigma, const SpectrumProfile& delta_tilde,
                const SpectrumProfile& pi) {
    check_sizes(sigma, delta_tilde, pi);
    require_positive_pi(pi);
    std::vector<double> lambda(sigma.size());
    for (std::size_t n = 0; n < sigma.size(); ++n)
        lambda[n] = sigma[n] * sigma[n] * delta_tilde[n] / pi[n];
    return from_lambda(sigma, std::move(lambda), Paradigm::post(),
                       "Delta~(X)=" + describe(delta_tilde) + "; Pi=" + describe(pi));
}

Filter fit_adv(std::span<const double> sigma, const SpectrumProfile& delta, const SpectrumProfile& pi,
               double beta) {
    check_beta(beta);
    check_sizes(sigma, delta, pi);
    const double prefactor = 3.0 / (8.0 * beta);
    std::vector<double> lambda(sigma.size());
    std::vector<std::size_t> flagged;
    for (std::size_t n = 0; n < sigma.size(); ++n) {
        const double denom = 3.0 * sigma[n] * sigma[n] * pi[n] + delta[n];
        if (denom == 0.0) {
            lambda[n] = 0.0;  // 0/0: noiseless limit
            flagged.push_back(n + 1);
        } else {
            lambda[n] = prefactor * delta[n] / denom;
        }
    }
    Filter f = from_lambda(sigma, std::move(lambda), Paradigm::adv(beta),
                           "Delta(Y)=" + describe(delta) + "; Pi=" + describe(pi));
    f.flagged_modes = std::move(flagged);
    return f;
}

Filter fit_sc(std::span<const double> sigma, const SpectrumProfile& delta, const SpectrumProfile& pi,
              double beta) {
    check_beta(beta);
    check_sizes(sigma, delta, pi);
    require_positive_pi(pi);
    const double prefactor = 1.0 / (8.0 * beta);
    std::vector<double> lambda(sigma.size());
    for (std::size_t n = 0; n < sigma.size(); ++n) lambda[n] = prefactor * (delta[n] / pi[n]);
    return from_lambda(sigma, std::move(lambda), Paradigm::sc(beta),
                       "Delta(Y)=" + describe(delta) + "; Pi=" + describe(pi));
}

Denoiser fit_denoiser(const SpectrumProfile& delta_tilde, const SpectrumProfile& pi) {
    if (delta_tilde.size() != pi.size()) throw DimensionError("denoiser: profile lengths differ");
    delta_tilde.validate();
    pi.validate();
    require_positive_pi(pi);
    Denoiser d;
    d.lambda.resize(pi.size());
    d.d.resize(pi.size());
    for (std::size_t n = 0; n < pi.size(); ++n) {
        d.lambda[n] = delta_tilde[n] / pi[n];
        d.d[n] = 1.0 / (1.0 + d.lambda[n]);
    }
    d.training_reference = "Delta~(X)=" + describe(delta_tilde) + "; Pi=" + describe(pi);
    return d;
}

Filter pseudo_inverse_filter(std::span<const double> sigma) {
    return from_lambda(sigma, std::vector<double>(sigma.size(), 0.0), Paradigm::pseudo_inverse(),
                       "none");
}

Filter truncated_svd_filter(std::span<const double> sigma, std::size_t k) {
    if (k < 1 || k > sigma.size())
        throw InvalidArgument("truncated SVD: k must be in [1, " + std::to_string(sigma.size()) + "]");
    std::vector<double> lambda(sigma.size(), 0.0);
    for (std::size_t n = k; n < sigma.size(); ++n) lambda[n] = std::numeric_limits<double>::infinity();
    return from_lambda(sigma, std::move(lambda), Paradigm::truncated_svd(k), "none");
}

Filter fit_filter(const Paradigm& p, std::span<const double> sigma, const SpectrumProfile& training,
                  const SpectrumProfile& pi) {
    switch (p.kind) {
        case ParadigmKind::mse: return fit_mse(sigma, training, pi);
        case ParadigmKind::prox: return fit_prox(sigma, training, pi);
        case ParadigmKind::post: return fit_post(sigma, training, pi);
        case ParadigmKind::adv: return fit_adv(sigma, training, pi, p.beta);
        case ParadigmKind::sc: return fit_sc(sigma, training, pi, p.beta);
        case ParadigmKind::pseudo_inverse: return pseudo_inverse_filter(sigma);
        case ParadigmKind::truncated_svd: return truncated_svd_filter(sigma, p.k);
    }
    throw InvalidArgument("unknown paradigm");
}

Vector reconstruct(std::span<const double> y, const Filter& f, const SingularSystem& sys) {
    if (f.size() != sys.n_modes())
        throw DimensionError("filter has " + std::to_string(f.size()) + " modes, system has " +
                             std::to_string(sys.n_modes()));
    Vector c = y_coefficients(sys, y);
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= f.g[n];
    return synthesize_x(sys, c);
}

Vector denoise(std::span<const double> x, const Denoiser& d, const SingularSystem& sys) {
    if (d.d.size() != sys.n_modes()) throw DimensionError("denoiser size does not match the system");
    Vector c = x_coefficients(sys, x);
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= d.d[n];
    return synthesize_x(sys, c);
}

bool lipschitz_condition_holds(const Filter& f) {
    return std::all_of(f.lambda.begin(), f.lambda.end(), [](double l) { return l <= 0.5; });
}

}  // namespace specreg
