#include "specreg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "specreg/error.hpp"
#include "specreg/rng.hpp"

namespace specreg {

std::size_t RadonSpec::detector_count() const {
    if (detectors != 0) return detectors;
    return static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 * static_cast<double>(side)));
}

std::string operator_kind(const OperatorSpec& spec) {
    struct Visitor {
        std::string operator()(const DiagonalSpec&) const { return "diagonal"; }
        std::string operator()(const ConvolutionSpec&) const { return "convolution1d"; }
        std::string operator()(const RadonSpec&) const { return "radon2d"; }
    };
    return std::visit(Visitor{}, spec);
}

namespace {

DenseMatrix build_diagonal(const DiagonalSpec& s) {
    if (!(s.decay > 0.0) || !std::isfinite(s.decay))
        throw InvalidArgument("diagonal operator: decay exponent must be > 0");
    if (s.size == 0) throw InvalidArgument("diagonal operator: size must be positive");
    if (s.size > kMaxGramDim) throw ResourceError("diagonal operator: size exceeds workspace");
    std::vector<double> d(s.size);
    for (std::size_t n = 0; n < s.size; ++n) d[n] = std::pow(static_cast<double>(n + 1), -s.decay);
    return DenseMatrix::diagonal(d);
}

DenseMatrix build_convolution(const ConvolutionSpec& s) {
    if (s.length == 0) throw InvalidArgument("convolution1d: length must be positive");
    if (s.kernel.empty() || s.kernel.size() > s.length)
        throw InvalidArgument("convolution1d: kernel length must be in [1, length]");
    if (s.length > kMaxGramDim) throw ResourceError("convolution1d: length exceeds workspace");
    bool nonzero = false;
    for (double k : s.kernel) {
        if (!std::isfinite(k)) throw InvalidArgument("convolution1d: non-finite kernel sample");
        nonzero = nonzero || k != 0.0;
    }
    if (!nonzero) throw InvalidArgument("convolution1d: kernel is identically zero");
    const std::size_t L = s.length;
    DenseMatrix a(L, L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < s.kernel.size(); ++j) a(i, (i + L - j) % L) += s.kernel[j];
    return a;
}

struct Segment {
    double t_in;
    double t_out;
    bool hit;
};

// Clip the ray p(t) = offset*(cos, sin) + t*(-sin, cos) to the image square.
Segment clip_to_square(double h, double x0, double y0, double dx, double dy) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    auto slab = [&](double p0, double dp) {
        if (std::abs(dp) < 1e-15) {
            if (p0 < -h || p0 > h) {
                lo = 1.0;
                hi = 0.0;
            }
            return;
        }
        double a = (-h - p0) / dp, b = (h - p0) / dp;
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    };
    slab(x0, dx);
    slab(y0, dy);
    return {lo, hi, hi > lo};
}

}  // namespace

Ray radon_ray(const RadonSpec& spec, std::size_t row) {
    const std::size_t det = spec.detector_count();
    const std::size_t a = row / det, k = row % det;
    const double theta = std::numbers::pi * static_cast<double>(a) / static_cast<double>(spec.angles);
    const double radius = 0.5 * std::numbers::sqrt2 * static_cast<double>(spec.side);
    const double width = 2.0 * radius / static_cast<double>(det);
    return {theta, -radius + (static_cast<double>(k) + 0.5) * width};
}

double chord_length(const RadonSpec& spec, const Ray& ray) {
    const double h = 0.5 * static_cast<double>(spec.side);
    const double c = std::cos(ray.theta), s = std::sin(ray.theta);
    const Segment seg = clip_to_square(h, ray.offset * c, ray.offset * s, -s, c);
    return seg.hit ? seg.t_out - seg.t_in : 0.0;
}

namespace {

DenseMatrix build_radon(const RadonSpec& s) {
    if (s.side < 2 || s.angles == 0) throw InvalidArgument("radon2d: side >= 2 and angles >= 1 required");
    if (s.side * s.side > kMaxRadonPixels)
        throw ResourceError("radon2d: side^2 exceeds " + std::to_string(kMaxRadonPixels) + " pixels");
    const std::size_t P = s.side;
    const std::size_t det = s.detector_count();
    const std::size_t rows = s.angles * det;
    const double h = 0.5 * static_cast<double>(P);
    DenseMatrix a(rows, P * P);

    std::vector<double> ts;
    ts.reserve(2 * P + 4);
    for (std::size_t r = 0; r < rows; ++r) {
        const Ray ray = radon_ray(s, r);
        const double c = std::cos(ray.theta), sn = std::sin(ray.theta);
        const double x0 = ray.offset * c, y0 = ray.offset * sn;
        const double dx = -sn, dy = c;
        const Segment seg = clip_to_square(h, x0, y0, dx, dy);
        if (!seg.hit) continue;

        // Siddon traversal: all grid-line crossings strictly inside the chord.
        ts.clear();
        ts.push_back(seg.t_in);
        ts.push_back(seg.t_out);
        for (std::size_t k = 0; k <= P; ++k) {
            const double line = -h + static_cast<double>(k);
            if (std::abs(dx) >= 1e-15) {
                const double t = (line - x0) / dx;
                if (t > seg.t_in && t < seg.t_out) ts.push_back(t);
            }
            if (std::abs(dy) >= 1e-15) {
                const double t = (line - y0) / dy;
                if (t > seg.t_in && t < seg.t_out) ts.push_back(t);
            }
        }
        std::sort(ts.begin(), ts.end());
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            const double len = ts[k + 1] - ts[k];
            if (len <= 0.0) continue;
            const double tm = 0.5 * (ts[k] + ts[k + 1]);
            const double xm = x0 + tm * dx, ym = y0 + tm * dy;
            const auto col = static_cast<std::size_t>(
                std::clamp(std::floor(xm + h), 0.0, static_cast<double>(P - 1)));
            const auto row = static_cast<std::size_t>(
                std::clamp(std::floor(h - ym), 0.0, static_cast<double>(P - 1)));
            a(r, row * P + col) += len;
        }
    }
    return a;
}

}  // namespace

DenseMatrix build_operator(const OperatorSpec& spec) {
    struct Visitor {
        DenseMatrix operator()(const DiagonalSpec& s) const { return build_diagonal(s); }
        DenseMatrix operator()(const ConvolutionSpec& s) const { return build_convolution(s); }
        DenseMatrix operator()(const RadonSpec& s) const { return build_radon(s); }
    };
    DenseMatrix a = std::visit(Visitor{}, spec);
    a.require_finite();
    if (a.max_abs() == 0.0) throw InvalidArgument("operator matrix is identically zero");
    return a;
}

Phantom generate_phantom(std::size_t side, std::uint64_t seed) {
    if (side < 4) throw InvalidArgument("phantom side must be >= 4");
    if (side * side > (std::size_t{1} << 24)) throw ResourceError("phantom too large");
    CounterRng rng(seed, Stream::phantom);

    struct Ellipse {
        double cx, cy, a, b, cos_phi, sin_phi, intensity;
    };
    const auto count = 3 + static_cast<std::size_t>(rng.below(6));
    std::vector<Ellipse> ellipses;
    ellipses.reserve(count);
    for (std::size_t e = 0; e < count; ++e) {
        Ellipse el{};
        el.cx = rng.uniform(-0.6, 0.6);
        el.cy = rng.uniform(-0.6, 0.6);
        el.a = rng.uniform(0.1, 0.5);
        el.b = rng.uniform(0.1, 0.5);
        const double phi = rng.uniform(0.0, std::numbers::pi);
        el.cos_phi = std::cos(phi);
        el.sin_phi = std::sin(phi);
        el.intensity = rng.uniform(0.1, 0.6);
        ellipses.push_back(el);
    }

    Phantom ph;
    ph.side = side;
    ph.seed = seed;
    ph.pixels.assign(side * side, 0.0);
    const double scale = 2.0 / static_cast<double>(side);
    for (std::size_t i = 0; i < side; ++i) {
        const double y = 1.0 - (static_cast<double>(i) + 0.5) * scale;
        for (std::size_t j = 0; j < side; ++j) {
            const double x = (static_cast<double>(j) + 0.5) * scale - 1.0;
            double v = 0.0;
            for (const auto& el : ellipses) {
                const double dx = x - el.cx, dy = y - el.cy;
                const double xr = dx * el.cos_phi + dy * el.sin_phi;
                const double yr = -dx * el.sin_phi + dy * el.cos_phi;
                if ((xr * xr) / (el.a * el.a) + (yr * yr) / (el.b * el.b) <= 1.0) v += el.intensity;
            }
            ph.pixels[i * side + j] = std::clamp(v, 0.0, 1.0);
        }
    }
    return ph;
}

std::vector<Vector> sample_data_corpus(const OperatorSpec& spec, const SingularSystem& sys,
                                       std::size_t count, std::uint64_t seed,
                                       const CorpusOptions& options) {
    if (count == 0) throw InvalidArgument("sample_data_corpus: count must be >= 1");
    std::vector<Vector> corpus;
    corpus.reserve(count);

    if (const auto* radon = std::get_if<RadonSpec>(&spec)) {
        if (sys.dim_x() != radon->side * radon->side)
            throw DimensionError("sample_data_corpus: system does not match the radon image size");
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint64_t sub = CounterRng(seed, Stream::data, i).next_u64();
            corpus.push_back(generate_phantom(radon->side, sub).pixels);
        }
        return corpus;
    }

    if (!(options.q > 1.0))
        throw InvalidArgument("trace-class violated: coefficient decay q must exceed 1 (got " +
                              std::to_string(options.q) + ")");
    const std::size_t N = sys.n_modes();
    std::vector<double> scale(N);
    for (std::size_t n = 0; n < N; ++n)
        scale[n] = std::pow(static_cast<double>(n + 1), -0.5 * options.q);
    Vector coeffs(N);
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(seed, Stream::data, i);
        for (std::size_t n = 0; n < N; ++n) coeffs[n] = scale[n] * rng.gaussian();
        corpus.push_back(synthesize_x(sys, coeffs));
    }
    return corpus;
}

}  // namespace specreg
