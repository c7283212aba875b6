#include <doctest.h>

#include <cmath>
#include <limits>

#include "specreg/error.hpp"
#include "specreg/learners.hpp"
#include "specreg/operators.hpp"
#include "specreg/oracles.hpp"
#include "support/eigen_oracles.hpp"
#include "support/oracles.hpp"

using namespace specreg;

namespace {

std::vector<double> harmonic_sigma(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 1.0 / double(i + 1);
    return s;
}

SpectrumProfile random_profile(std::size_t n, std::uint64_t seed, double lo, double hi) {
    CounterRng rng(seed, Stream::test_vector, 0);
    std::vector<double> v(n);
    for (auto& x : v) x = std::exp(rng.uniform(std::log(lo), std::log(hi)));
    return SpectrumProfile::from_values(std::move(v));
}

void check_same_filter(const Filter& a, const Filter& b, double rel) {
    REQUIRE(a.size() == b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(oracle::rel_diff(a.g[n], b.g[n]) <= rel);
        CHECK(oracle::rel_diff(a.lambda[n], b.lambda[n]) <= rel);
    }
}

double grid_lambda(const ScalarObjective& obj, double hi) {
    return oracle::grid_argmin([&](double l) { return obj.value(l); }, 0.0, hi, 200001);
}

}  // namespace

TEST_CASE("mse: worked example lambda = 0.25, g = 1") {
    const double sigma[] = {0.5};
    const Filter f = fit_mse(sigma, SpectrumProfile::from_values({0.0625}), SpectrumProfile::from_values({0.25}));
    CHECK(f.lambda[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f.g[0] == doctest::Approx(1.0).epsilon(1e-15));
    // per-mode grid oracle on E(g) = (1 - sigma g)^2 Pi + g^2 Delta
    const double g_ref = oracle::grid_argmin(
        [](double g) { return (1 - 0.5 * g) * (1 - 0.5 * g) * 0.25 + g * g * 0.0625; }, 0.0, 2.0, 200001);
    CHECK(std::abs(g_ref - f.g[0]) <= 1e-5);
    CHECK(f.paradigm == Paradigm::mse());
    CHECK(f.training_reference.find("Pi=") != std::string::npos);
}

TEST_CASE("zero training noise reduces every paradigm to the pseudo-inverse") {
    const auto sigma = harmonic_sigma(6);
    const auto zero = SpectrumProfile::from_values(std::vector<double>(6, 0.0));
    const auto pi = SpectrumProfile::decay(2.0, 6);
    const Filter pinv = pseudo_inverse_filter(sigma);
    for (const Paradigm& p : {Paradigm::mse(), Paradigm::prox(), Paradigm::post(), Paradigm::adv(), Paradigm::sc(),
                              Paradigm::sc(0.3)}) {
        const Filter f = fit_filter(p, sigma, zero, pi);
        for (std::size_t n = 0; n < 6; ++n) {
            CHECK(f.lambda[n] == 0.0);
            CHECK(f.g[n] == pinv.g[n]);
        }
    }
    for (std::size_t n = 0; n < 6; ++n) CHECK(pinv.g[n] == doctest::Approx(double(n + 1)).epsilon(1e-15));
}

TEST_CASE("large training noise drives g to zero monotonically") {
    const double sigma[] = {0.3};
    const auto pi = SpectrumProfile::from_values({0.5});
    double prev = std::numeric_limits<double>::infinity();
    for (double d = 1e-6; d < 1e8; d *= 10) {
        const double g = fit_mse(sigma, SpectrumProfile::from_values({d}), pi).g[0];
        CHECK(g < prev);
        prev = g;
    }
    CHECK(prev < 2e-8);  // 0.3 / (0.09 + 1e7 / 0.5)
}

TEST_CASE("mse monotonicity over a grid") {
    const double sigma[] = {0.7};
    for (double pi = 0.01; pi < 10; pi *= 1.7) {
        double prev = std::numeric_limits<double>::infinity();
        for (double d = 0.0; d < 5; d += 0.25) {
            const double g =
                fit_mse(sigma, SpectrumProfile::from_values({d}), SpectrumProfile::from_values({pi})).g[0];
            CHECK(g <= prev);
            prev = g;
        }
    }
    for (double d = 0.01; d < 10; d *= 1.7) {
        double prev = 0.0;
        for (double pi = 0.05; pi < 5; pi += 0.25) {
            const double g =
                fit_mse(sigma, SpectrumProfile::from_values({d}), SpectrumProfile::from_values({pi})).g[0];
            CHECK(g >= prev);
            prev = g;
        }
    }
}

TEST_CASE("shrinkage: 0 < g_n <= 1/sigma_n with equality iff lambda_n = 0") {
    const auto sigma = harmonic_sigma(20);
    const auto pi = random_profile(20, 1, 1e-4, 1.0);
    auto delta = random_profile(20, 2, 1e-6, 1e-1);
    delta.values[3] = 0.0;
    delta = SpectrumProfile::from_values(delta.values);
    for (const Paradigm& p : {Paradigm::mse(), Paradigm::prox(), Paradigm::post(), Paradigm::adv(), Paradigm::sc(),
                              Paradigm::adv(1.0), Paradigm::sc(2.0)}) {
        const Filter f = fit_filter(p, sigma, delta, pi);
        for (std::size_t n = 0; n < 20; ++n) {
            CHECK(f.lambda[n] >= 0.0);
            CHECK(f.g[n] > 0.0);
            CHECK(f.g[n] <= 1.0 / sigma[n] * (1 + 1e-15));
            CHECK((f.lambda[n] == 0.0) == (f.g[n] == sigma[n] / (sigma[n] * sigma[n])));
            CHECK(f.g[n] == sigma[n] / (sigma[n] * sigma[n] + f.lambda[n]));
        }
    }
}

TEST_CASE("equivalences between paradigms") {
    const auto sigma = harmonic_sigma(32);
    const auto pi = random_profile(32, 3, 1e-5, 1.0);
    const auto delta = random_profile(32, 4, 1e-8, 1e-2);

    SUBCASE("sc(1/8) = mse") { check_same_filter(fit_sc(sigma, delta, pi, 1.0 / 8.0), fit_mse(sigma, delta, pi), 1e-15); }
    SUBCASE("sc(1/4) halves lambda") {
        const Filter a = fit_sc(sigma, delta, pi, 0.25), m = fit_mse(sigma, delta, pi);
        for (std::size_t n = 0; n < 32; ++n) CHECK(oracle::rel_diff(a.lambda[n], 0.5 * m.lambda[n]) <= 1e-15);
    }
    SUBCASE("prox with Delta~ = Delta equals mse") {
        check_same_filter(fit_prox(sigma, delta, pi), fit_mse(sigma, delta, pi), 1e-15);
    }
    SUBCASE("post with Delta = sigma^2 Delta~ equals mse") {
        std::vector<double> d(32);
        for (std::size_t n = 0; n < 32; ++n) d[n] = sigma[n] * sigma[n] * delta[n];
        check_same_filter(fit_post(sigma, delta, pi), fit_mse(sigma, SpectrumProfile::from_values(d), pi), 1e-15);
    }
    SUBCASE("post is the denoiser composed with the pseudo-inverse") {
        const Filter post = fit_post(sigma, delta, pi);
        const Denoiser den = fit_denoiser(delta, pi);
        for (std::size_t n = 0; n < 32; ++n) CHECK(oracle::rel_diff(den.d[n] / sigma[n], post.g[n]) <= 1e-15);
    }
    SUBCASE("prox formula on random profiles") {
        const Filter f = fit_prox(sigma, delta, pi);
        for (std::size_t n = 0; n < 32; ++n)
            CHECK(oracle::rel_diff(f.g[n], sigma[n] / (sigma[n] * sigma[n] + delta[n] / pi[n])) <= 1e-15);
    }
}

TEST_CASE("adv worked example and uniform bound") {
    const double sigma[] = {1.0};
    const Filter f = fit_adv(sigma, SpectrumProfile::from_values({3.0}), SpectrumProfile::from_values({1.0}), 0.375);
    CHECK(f.lambda[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.g[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const ScalarObjective obj{ObjectiveKind::adv, 0.375, 1.0, 1.0, 3.0};
    CHECK(std::abs(grid_lambda(obj, 1.0) - 0.5) <= 1e-5);

    const auto s = harmonic_sigma(40);
    for (double beta : {0.1, 0.375, 2.0}) {
        const Filter a = fit_adv(s, random_profile(40, 5, 1e-6, 10.0), random_profile(40, 6, 1e-6, 1.0), beta);
        for (double l : a.lambda) CHECK(l < 3.0 / (8.0 * beta));
    }
}

TEST_CASE("adv resolves 0/0 to the noiseless limit and flags it") {
    const double sigma[] = {1.0, 0.5, 0.25};
    const Filter f =
        fit_adv(sigma, SpectrumProfile::from_values({0.1, 0.0, 0.1}), SpectrumProfile::from_values({1.0, 0.0, 1.0}));
    CHECK(f.lambda[1] == 0.0);
    CHECK(f.g[1] == 2.0);
    CHECK(f.flagged_modes == std::vector<std::size_t>{2});
    CHECK_THROWS_AS(fit_adv(sigma, SpectrumProfile::white(0.1, 3), SpectrumProfile::decay(1, 3), 0.0), InvalidArgument);
    CHECK_THROWS_AS(fit_sc(sigma, SpectrumProfile::white(0.1, 3), SpectrumProfile::decay(1, 3), -1.0), InvalidArgument);
}

TEST_CASE("closed-form adv and sc weights beat +-5% perturbations on the scalar objective") {
    const auto sigma = harmonic_sigma(24);
    const auto pi = random_profile(24, 7, 1e-4, 1.0);
    const auto delta = random_profile(24, 8, 1e-6, 1e-1);
    for (double beta : {0.125, 0.375, 1.0}) {
        const Filter adv = fit_adv(sigma, delta, pi, beta);
        const Filter sc = fit_sc(sigma, delta, pi, beta);
        for (std::size_t n = 0; n < 24; ++n) {
            const ScalarObjective oa{ObjectiveKind::adv, beta, sigma[n], pi[n], delta[n]};
            const ScalarObjective os{ObjectiveKind::sc, beta, sigma[n], pi[n], delta[n]};
            for (double factor : {0.95, 1.05}) {
                CHECK(oa.value(adv.lambda[n]) < oa.value(factor * adv.lambda[n]));
                CHECK(os.value(sc.lambda[n]) < os.value(factor * sc.lambda[n]));
            }
        }
    }
}

TEST_CASE("positivity of Pi is required and the mode is named") {
    const std::vector<double> sigma{1.0, 0.5, 0.2};
    const auto delta = SpectrumProfile::white(0.1, 3);
    const auto pi = SpectrumProfile::from_values({1.0, 0.2, 0.0});
    for (auto fit : {fit_mse, fit_prox, fit_post}) {
        try {
            fit(sigma, delta, pi);
            FAIL("expected AssumptionError");
        } catch (const AssumptionError& e) {
            CHECK(e.mode() == 3);
            CHECK(std::string(e.what()).find("mode n = 3") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(fit_sc(sigma, delta, pi), AssumptionError);
    CHECK_THROWS_AS(fit_denoiser(delta, pi), AssumptionError);
    CHECK_THROWS_AS(fit_mse(sigma, SpectrumProfile::white(0.1, 2), pi), DimensionError);
}

TEST_CASE("denoiser") {
    const auto pi = SpectrumProfile::from_values({1.0, 0.5, 0.25});
    SUBCASE("zero noise is the identity") {
        for (double d : fit_denoiser(SpectrumProfile::white(0.0, 3), pi).d) CHECK(d == 1.0);
    }
    SUBCASE("Delta~ = Pi halves every mode") {
        for (double d : fit_denoiser(pi, pi).d) CHECK(d == 0.5);
    }
    SUBCASE("x = u_1 maps to d_1 u_1; null space is annihilated") {
        const SingularSystem sys = compute_svd(oracle::random_matrix(3, 5, 19));
        const Denoiser d = fit_denoiser(SpectrumProfile::from_values({0.3, 0.1, 0.7}), pi);
        const auto out = denoise(sys.u(0), d, sys);
        for (std::size_t i = 0; i < 5; ++i) CHECK(out[i] == doctest::Approx(d.d[0] * sys.u(0)[i]));
        const Denoiser one = fit_denoiser(SpectrumProfile::white(0.0, 3), pi);
        const auto x = oracle::random_vector(5, 1);
        CHECK(oracle::max_abs_diff(denoise(x, one, sys), project_row_space(sys, x)) <= 1e-12);
    }
    SUBCASE("pseudo-inverse then denoise equals the post filter") {
        const SingularSystem sys = compute_svd(oracle::random_matrix(6, 3, 23));
        const auto dt = SpectrumProfile::from_values({0.3, 0.1, 0.7});
        const Denoiser d = fit_denoiser(dt, pi);
        const Filter post = fit_post(sys.sigma(), dt, pi);
        const Filter pinv = pseudo_inverse_filter(sys.sigma());
        for (std::uint64_t k = 0; k < 10; ++k) {
            const auto y = oracle::random_vector(6, 50, k);
            CHECK(oracle::max_abs_diff(denoise(reconstruct(y, pinv, sys), d, sys), reconstruct(y, post, sys)) <=
                  1e-12 * norm2(y) / sys.sigma(2));
        }
    }
}

TEST_CASE("fitted denoiser minimizes the empirical risk against +-10% perturbations") {
    const auto pi = SpectrumProfile::from_values({1.0, 0.25, 0.04, 0.01});
    const auto dt = SpectrumProfile::from_values({0.1, 0.1, 0.05, 0.02});
    const Denoiser fitted = fit_denoiser(dt, pi);
    const std::size_t draws = 100000;
    std::vector<double> risk_fit(4), risk_lo(4), risk_hi(4);
    for (std::size_t i = 0; i < draws; ++i) {
        CounterRng rng(17, Stream::test_vector, i);
        for (std::size_t n = 0; n < 4; ++n) {
            const double x = std::sqrt(pi[n]) * rng.gaussian();
            const double noisy = x + std::sqrt(dt[n]) * rng.gaussian();
            auto sq = [&](double d) { return (d * noisy - x) * (d * noisy - x); };
            risk_fit[n] += sq(fitted.d[n]);
            risk_lo[n] += sq(0.9 * fitted.d[n]);
            risk_hi[n] += sq(1.1 * fitted.d[n]);
        }
    }
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(risk_fit[n] < risk_lo[n]);
        CHECK(risk_fit[n] < risk_hi[n]);
    }
}

TEST_CASE("pseudo-inverse and truncated SVD") {
    const DenseMatrix a = oracle::random_matrix(9, 6, 71);
    const SingularSystem sys = compute_svd(a);
    const Filter pinv = pseudo_inverse_filter(sys.sigma());
    SUBCASE("A+ A = P on the row space") {
        for (std::uint64_t k = 0; k < 20; ++k) {
            const auto x = oracle::random_vector(6, 3, k);
            CHECK(oracle::max_abs_diff(reconstruct(apply_forward(sys, x), pinv, sys), project_row_space(sys, x)) <=
                  1e-8);
        }
    }
    SUBCASE("tsvd(k = n_modes) equals the pseudo-inverse") {
        const Filter t = truncated_svd_filter(sys.sigma(), sys.n_modes());
        CHECK(t.g == pinv.g);
    }
    SUBCASE("tsvd zeroes the tail") {
        const Filter t = truncated_svd_filter(sys.sigma(), 2);
        CHECK(t.g[1] == pinv.g[1]);
        CHECK(t.g[2] == 0.0);
        CHECK(std::isinf(t.lambda[5]));
        CHECK(t.paradigm.name() == "tsvd(2)");
    }
    CHECK_THROWS_AS(truncated_svd_filter(sys.sigma(), 0), InvalidArgument);
    CHECK_THROWS_AS(truncated_svd_filter(sys.sigma(), 7), InvalidArgument);
}

TEST_CASE("reconstruct") {
    const DenseMatrix a = oracle::random_matrix(7, 5, 90);
    const SingularSystem sys = compute_svd(a);
    const Filter f = fit_mse(sys.sigma(), random_profile(5, 9, 1e-3, 1e-1), random_profile(5, 10, 0.1, 1.0));

    SUBCASE("y = v_1 with g_1 = c gives c u_1") {
        const auto out = reconstruct(sys.v(0), f, sys);
        for (std::size_t i = 0; i < 5; ++i) CHECK(out[i] == doctest::Approx(f.g[0] * sys.u(0)[i]));
    }
    SUBCASE("linearity") {
        const auto y1 = oracle::random_vector(7, 1), y2 = oracle::random_vector(7, 2);
        std::vector<double> mix(7);
        for (std::size_t i = 0; i < 7; ++i) mix[i] = 2.5 * y1[i] + y2[i];
        const auto r1 = reconstruct(y1, f, sys), r2 = reconstruct(y2, f, sys), rm = reconstruct(mix, f, sys);
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(rm[i] - (2.5 * r1[i] + r2[i])) <= 1e-12);
    }
    SUBCASE("matches the dense Tikhonov normal equations") {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
        for (std::size_t n = 0; n < 5; ++n) {
            Eigen::VectorXd u(5);
            for (std::size_t i = 0; i < 5; ++i) u(i) = sys.u(n)[i];
            w += f.lambda[n] * u * u.transpose();
        }
        for (std::uint64_t k = 0; k < 10; ++k) {
            const auto y = oracle::random_vector(7, 11, k);
            const auto ref = oracle::tikhonov_normal_equations(a, y, w);
            CHECK(oracle::max_abs_diff(reconstruct(y, f, sys), ref) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(reconstruct(std::vector<double>(6), f, sys), DimensionError);
    CHECK_THROWS_AS(reconstruct(std::vector<double>(7), pseudo_inverse_filter(harmonic_sigma(3)), sys), DimensionError);
}

TEST_CASE("ERM oracle matches the mse filter within 4 standard errors at M = 1e5") {
    const std::size_t n_modes = 16, pairs = 100000;
    const auto sigma = harmonic_sigma(n_modes);
    const auto pi = SpectrumProfile::decay(2.0, n_modes);
    const auto delta = SpectrumProfile::white(0.01, n_modes);
    const Filter mse = fit_mse(sigma, delta, pi);
    ErmAccumulator acc(n_modes);
    std::vector<double> xc(n_modes), yc(n_modes);
    for (std::size_t i = 0; i < pairs; ++i) {
        CounterRng rng(3, Stream::test_vector, i);
        for (std::size_t n = 0; n < n_modes; ++n) {
            xc[n] = std::sqrt(pi[n]) * rng.gaussian();
            yc[n] = sigma[n] * xc[n] + std::sqrt(delta[n]) * rng.gaussian();
        }
        acc.add_coefficients(xc, yc);
    }
    CHECK(acc.pair_count() == pairs);
    const Filter erm = acc.finish(sigma);
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double rel_se = std::sqrt(delta[n] / (double(pairs) * pi[n] * sigma[n] * sigma[n]));
        CHECK(std::abs(erm.g[n] / mse.g[n] - 1.0) <= 4.0 * rel_se);
    }
}

TEST_CASE("parse_paradigm") {
    CHECK(parse_paradigm("mse") == Paradigm::mse());
    CHECK(parse_paradigm("prox") == Paradigm::prox());
    CHECK(parse_paradigm("post") == Paradigm::post());
    CHECK(parse_paradigm("pinv") == Paradigm::pseudo_inverse());
    CHECK(parse_paradigm("adv") == Paradigm::adv(0.375));
    CHECK(parse_paradigm("sc") == Paradigm::sc(0.125));
    CHECK(parse_paradigm("adv(0.5)") == Paradigm::adv(0.5));
    CHECK(parse_paradigm("tsvd(12)") == Paradigm::truncated_svd(12));
    for (const Paradigm& p : {Paradigm::adv(0.375), Paradigm::sc(0.3), Paradigm::truncated_svd(4), Paradigm::mse()})
        CHECK(parse_paradigm(p.name()) == p);
    CHECK(Paradigm::adv().name() == "adv(0.375)");
    for (const char* bad : {"", "foo", "adv(0)", "adv(-1)", "adv(x)", "tsvd", "tsvd(0)", "tsvd(2.5)", "mse(1)", "adv(1"})
        CHECK_THROWS_AS(parse_paradigm(bad), InvalidArgument);
}

TEST_CASE("Lipschitz condition lambda_n <= 1/2") {
    const double sigma[] = {1.0, 0.5};
    const Filter small =
        fit_mse(sigma, SpectrumProfile::from_values({0.1, 0.5}), SpectrumProfile::from_values({1.0, 1.0}));
    const Filter big =
        fit_mse(sigma, SpectrumProfile::from_values({0.1, 0.6}), SpectrumProfile::from_values({1.0, 1.0}));
    CHECK(lipschitz_condition_holds(small));
    CHECK_FALSE(lipschitz_condition_holds(big));
    CHECK_FALSE(lipschitz_condition_holds(truncated_svd_filter(sigma, 1)));
}
