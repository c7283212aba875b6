#include "specreg/stochastics.hpp"

#include <algorithm>
#include <cmath>

#include "specreg/error.hpp"
#include "specreg/rng.hpp"

namespace specreg {

std::string to_string(ProfileFamily family) {
    switch (family) {
        case ProfileFamily::white: return "white";
        case ProfileFamily::power_law: return "power_law";
        case ProfileFamily::explicit_values: return "explicit";
        case ProfileFamily::empirical: return "empirical";
    }
    return "unknown";
}

SpectrumProfile SpectrumProfile::white(double delta, std::size_t n_modes) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidArgument("white profile: delta must be >= 0");
    SpectrumProfile p;
    p.values.assign(n_modes, delta * delta);
    p.family = ProfileFamily::white;
    p.level = delta;
    return p;
}

SpectrumProfile SpectrumProfile::power_law(double delta, double r, std::size_t n_modes) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidArgument("power_law profile: delta must be >= 0");
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("power_law profile: exponent must be >= 0");
    SpectrumProfile p;
    p.values.resize(n_modes);
    for (std::size_t n = 0; n < n_modes; ++n)
        p.values[n] = delta * delta * std::pow(static_cast<double>(n + 1), -r);
    p.family = r == 0.0 ? ProfileFamily::white : ProfileFamily::power_law;
    p.level = delta;
    p.exponent = r;
    return p;
}

SpectrumProfile SpectrumProfile::decay(double p, std::size_t n_modes) {
    return power_law(1.0, p, n_modes);
}

SpectrumProfile SpectrumProfile::from_values(std::vector<double> values) {
    SpectrumProfile p;
    p.values = std::move(values);
    p.family = ProfileFamily::explicit_values;
    p.validate();
    return p;
}

SpectrumProfile SpectrumProfile::scaled(double factor) const {
    if (!(factor >= 0.0)) throw InvalidArgument("profile scale factor must be >= 0");
    SpectrumProfile p = *this;
    for (double& v : p.values) v *= factor;
    if (family == ProfileFamily::white || family == ProfileFamily::power_law)
        p.level = level * std::sqrt(factor);
    return p;
}

void SpectrumProfile::validate() const {
    for (std::size_t n = 0; n < values.size(); ++n)
        if (!(values[n] >= 0.0) || !std::isfinite(values[n]))
            throw InvalidArgument("profile value at mode " + std::to_string(n + 1) +
                                  " is negative or non-finite");
}

double NoiseModel::lower_bound(std::size_t n) const {
    if (!lower_bound_exponent) throw InvalidArgument("noise model carries no lower-bound rule");
    return std::pow(static_cast<double>(n), -*lower_bound_exponent);
}

DataModel DataModel::power_law(double q, std::size_t n_modes) {
    if (!(q > 0.0)) throw InvalidArgument("data model: decay exponent must be > 0");
    return {SpectrumProfile::decay(q, n_modes)};
}

void DataModel::require_positive() const {
    for (std::size_t n = 0; n < pi.size(); ++n)
        if (!(pi[n] > 0.0)) throw AssumptionError(n + 1);
}

double noise_level(const SpectrumProfile& profile) {
    if (profile.values.empty()) throw InvalidArgument("noise_level: empty profile");
    return std::sqrt(*std::max_element(profile.values.begin(), profile.values.end()));
}

double noise_level(const NoiseModel& model) { return noise_level(model.profile); }

Vector sample_noise_coefficients(const SpectrumProfile& profile, std::uint64_t seed,
                                 std::uint64_t index) {
    CounterRng rng(seed, Stream::noise, index);
    Vector c(profile.size());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = std::sqrt(profile[n]) * rng.gaussian();
    return c;
}

Vector sample_noise(const NoiseModel& model, const SingularSystem& sys, std::uint64_t seed,
                    std::uint64_t index) {
    if (model.profile.size() != sys.n_modes())
        throw DimensionError("noise profile has " + std::to_string(model.profile.size()) +
                             " modes, system has " + std::to_string(sys.n_modes()));
    const Vector c = sample_noise_coefficients(model.profile, seed, index);
    return model.side == NoiseSide::y_side ? synthesize_y(sys, c) : synthesize_x(sys, c);
}

SpectrumProfile estimate_profile(std::span<const Vector> samples, const ColumnSet& basis) {
    if (samples.empty()) throw InvalidArgument("estimate_profile: empty sample set");
    SpectrumProfile p;
    p.values.assign(basis.count, 0.0);
    for (const auto& s : samples) {
        if (s.size() != basis.dim)
            throw DimensionError("estimate_profile: sample length " + std::to_string(s.size()) +
                                 " != basis dimension " + std::to_string(basis.dim));
        for (std::size_t n = 0; n < basis.count; ++n) {
            const double c = dot(s, basis.column(n));
            p.values[n] += c * c;
        }
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (std::size_t n = 0; n < basis.count; ++n) {
        p.values[n] *= inv;
        if (p.values[n] == 0.0) p.zero_modes.push_back(n + 1);
    }
    p.family = ProfileFamily::empirical;
    p.sample_count = samples.size();
    return p;
}

NoiseModel training_noise_rule(double delta, TrainingFamily family, double r, std::size_t n_modes,
                               NoiseSide side) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("training noise: delta must be > 0");
    NoiseModel m;
    m.side = side;
    if (family == TrainingFamily::white) {
        m.profile = SpectrumProfile::white(delta, n_modes);
        m.lower_bound_exponent = 0.0;
    } else {
        if (!(r >= 0.0)) throw InvalidArgument("training noise: exponent r must be >= 0");
        m.profile = SpectrumProfile::power_law(delta, r, n_modes);
        m.lower_bound_exponent = r;
    }
    return m;
}

}  // namespace specreg
