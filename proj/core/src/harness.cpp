#include "specreg/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "specreg/error.hpp"
#include "specreg/io.hpp"
#include "specreg/rng.hpp"

namespace specreg::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;
using io::format_number;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::continuity_sweep: return "continuity_sweep";
        case ExperimentKind::convergence_sweep: return "convergence_sweep";
        case ExperimentKind::recon_grid: return "recon_grid";
        case ExperimentKind::fit_report: return "fit_report";
    }
    return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
    for (auto k : {ExperimentKind::continuity_sweep, ExperimentKind::convergence_sweep, ExperimentKind::recon_grid,
                   ExperimentKind::fit_report})
        if (name == to_string(k)) return k;
    throw ConfigError("experiment", "unknown experiment '" + std::string(name) +
                                        "' (expected continuity_sweep, convergence_sweep, recon_grid or fit_report)");
}

std::string NoiseFamily::label() const {
    if (family == TrainingFamily::white) return "white";
    return "power_law(" + format_number(exponent) + ")";
}

SpectrumProfile NoiseFamily::profile(double level, std::size_t n_modes) const {
    if (family == TrainingFamily::white) return SpectrumProfile::white(level, n_modes);
    return SpectrumProfile::power_law(level, exponent, n_modes);
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.experiment = kind;
    const std::vector<NoiseFamily> families{{TrainingFamily::white, 0.0},
                                            {TrainingFamily::power_law, 0.5},
                                            {TrainingFamily::power_law, 4.0}};
    switch (kind) {
        case ExperimentKind::continuity_sweep:
            cfg.op = DiagonalSpec{1.0, 64};
            cfg.dimensions = {16, 32, 64, 128};
            cfg.data.source = DataSource::explicit_decay;
            cfg.data.pi_exponent = 1.0;
            cfg.training = {TrainingFamily::white, 0.0};
            cfg.delta_grid = {0.001};
            cfg.paradigms = {Paradigm::pseudo_inverse(), Paradigm::mse(), Paradigm::prox(), Paradigm::post(),
                             Paradigm::adv(), Paradigm::sc()};
            break;
        case ExperimentKind::convergence_sweep:
            cfg.op = DiagonalSpec{1.0, 64};
            cfg.test_noise = families;
            for (int i = 0; i < 5; ++i) cfg.delta_grid.push_back(std::pow(10.0, -1.0 - 0.5 * i));
            cfg.paradigms = {Paradigm::mse(), Paradigm::prox(), Paradigm::post(), Paradigm::adv(), Paradigm::sc(),
                             Paradigm::pseudo_inverse()};
            break;
        case ExperimentKind::recon_grid:
            cfg.op = RadonSpec{16, 24, 0};
            cfg.data.source = DataSource::phantoms;
            cfg.test_noise = families;
            cfg.delta_grid = {0.1, 0.01, 0.001};
            cfg.paradigms = {Paradigm::mse(), Paradigm::post(), Paradigm::adv(), Paradigm::pseudo_inverse()};
            break;
        case ExperimentKind::fit_report:
            cfg.op = DiagonalSpec{1.0, 64};
            cfg.test_noise = {families[0]};
            cfg.delta_grid = {0.01};
            cfg.paradigms = {Paradigm::mse(), Paradigm::prox(), Paradigm::post(), Paradigm::adv(), Paradigm::sc(),
                             Paradigm::pseudo_inverse(), Paradigm::truncated_svd(16)};
            break;
    }
    return cfg;
}

namespace {

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

std::size_t count_at(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return item.key() == a; });
        if (!known) throw ConfigError(prefix + item.key(), "unknown field");
    }
}

NoiseFamily parse_family(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    reject_unknown(j, path + ".", {"family", "exponent", "level"});
    NoiseFamily f;
    const std::string name = j.contains("family") ? string_at(j["family"], path + ".family") : "white";
    if (name == "white") {
        f.family = TrainingFamily::white;
        if (j.contains("exponent") && number_at(j["exponent"], path + ".exponent") != 0.0)
            throw ConfigError(path + ".exponent", "white noise has exponent 0");
    } else if (name == "power_law") {
        f.family = TrainingFamily::power_law;
        if (!j.contains("exponent")) throw ConfigError(path + ".exponent", "required for power_law");
        f.exponent = number_at(j["exponent"], path + ".exponent");
    } else {
        throw ConfigError(path + ".family", "unknown noise family '" + name + "' (expected white or power_law)");
    }
    return f;
}

OperatorSpec parse_operator(const json& j, std::vector<std::size_t>& dimensions) {
    if (!j.is_object()) throw ConfigError("operator", "expected an object");
    if (!j.contains("kind")) throw ConfigError("operator.kind", "required");
    const std::string kind = string_at(j["kind"], "operator.kind");
    if (j.contains("dimensions")) {
        const auto& d = j["dimensions"];
        if (!d.is_array()) throw ConfigError("operator.dimensions", "expected an array");
        dimensions.clear();
        for (std::size_t i = 0; i < d.size(); ++i)
            dimensions.push_back(count_at(d[i], "operator.dimensions[" + std::to_string(i) + "]"));
    }
    if (kind == "diagonal") {
        reject_unknown(j, "operator.", {"kind", "decay", "size", "dimensions"});
        DiagonalSpec s;
        if (j.contains("decay")) s.decay = number_at(j["decay"], "operator.decay");
        if (j.contains("size")) s.size = count_at(j["size"], "operator.size");
        return s;
    }
    if (kind == "convolution1d") {
        reject_unknown(j, "operator.", {"kind", "kernel", "length", "dimensions"});
        ConvolutionSpec s;
        if (j.contains("kernel")) {
            const auto& k = j["kernel"];
            if (!k.is_array()) throw ConfigError("operator.kernel", "expected an array");
            s.kernel.clear();
            for (std::size_t i = 0; i < k.size(); ++i)
                s.kernel.push_back(number_at(k[i], "operator.kernel[" + std::to_string(i) + "]"));
        }
        if (j.contains("length")) s.length = count_at(j["length"], "operator.length");
        return s;
    }
    if (kind == "radon2d") {
        reject_unknown(j, "operator.", {"kind", "side", "angles", "detectors", "dimensions"});
        RadonSpec s;
        if (j.contains("side")) s.side = count_at(j["side"], "operator.side");
        if (j.contains("angles")) s.angles = count_at(j["angles"], "operator.angles");
        if (j.contains("detectors")) s.detectors = count_at(j["detectors"], "operator.detectors");
        return s;
    }
    throw ConfigError("operator.kind", "unknown operator kind '" + kind +
                                           "' (expected diagonal, convolution1d or radon2d)");
}

DataSpec parse_data(const json& j) {
    if (!j.is_object()) throw ConfigError("data", "expected an object");
    reject_unknown(j, "data.", {"q", "pi_exponent", "corpus", "phantoms"});
    if (j.size() != 1) throw ConfigError("data", "exactly one of q, pi_exponent, corpus, phantoms is required");
    DataSpec d;
    if (j.contains("q")) {
        d.source = DataSource::analytic;
        d.q = number_at(j["q"], "data.q");
    } else if (j.contains("pi_exponent")) {
        d.source = DataSource::explicit_decay;
        d.pi_exponent = number_at(j["pi_exponent"], "data.pi_exponent");
    } else if (j.contains("corpus")) {
        d.source = DataSource::corpus;
        d.corpus_path = string_at(j["corpus"], "data.corpus");
    } else {
        d.source = DataSource::phantoms;
        d.phantom_count = count_at(j["phantoms"], "data.phantoms");
    }
    return d;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("(document)", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("(document)", "expected a JSON object");
    reject_unknown(j, "", {"experiment", "operator", "data", "training_noise", "test_noise", "delta_grid",
                           "paradigms", "perturbation", "seed", "output_dir", "uniform_scaling"});
    if (!j.contains("experiment")) throw ConfigError("experiment", "required");
    ExperimentConfig cfg = default_config(parse_experiment(string_at(j["experiment"], "experiment")));

    if (j.contains("operator")) cfg.op = parse_operator(j["operator"], cfg.dimensions);
    if (j.contains("data")) cfg.data = parse_data(j["data"]);
    if (j.contains("training_noise")) {
        const auto& t = j["training_noise"];
        cfg.training = parse_family(t, "training_noise");
        if (t.contains("level")) cfg.training_level = number_at(t["level"], "training_noise.level");
    }
    if (j.contains("test_noise")) {
        const auto& t = j["test_noise"];
        if (!t.is_array()) throw ConfigError("test_noise", "expected an array");
        cfg.test_noise.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string path = "test_noise[" + std::to_string(i) + "]";
            if (t[i].is_object() && t[i].contains("level"))
                throw ConfigError(path + ".level", "test levels follow the delta grid");
            cfg.test_noise.push_back(parse_family(t[i], path));
        }
    }
    if (j.contains("delta_grid")) {
        const auto& d = j["delta_grid"];
        if (!d.is_array()) throw ConfigError("delta_grid", "expected an array");
        cfg.delta_grid.clear();
        for (std::size_t i = 0; i < d.size(); ++i)
            cfg.delta_grid.push_back(number_at(d[i], "delta_grid[" + std::to_string(i) + "]"));
    }
    if (j.contains("paradigms")) {
        const auto& p = j["paradigms"];
        if (!p.is_array()) throw ConfigError("paradigms", "expected an array");
        cfg.paradigms.clear();
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string path = "paradigms[" + std::to_string(i) + "]";
            try {
                cfg.paradigms.push_back(parse_paradigm(string_at(p[i], path)));
            } catch (const InvalidArgument& e) {
                throw ConfigError(path, e.what());
            }
        }
    }
    if (j.contains("perturbation")) cfg.perturbation = number_at(j["perturbation"], "perturbation");
    if (j.contains("seed")) {
        const auto& s = j["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError("seed", "expected a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (j.contains("output_dir")) cfg.output_dir = string_at(j["output_dir"], "output_dir");
    if (j.contains("uniform_scaling")) {
        if (!j["uniform_scaling"].is_boolean()) throw ConfigError("uniform_scaling", "expected true or false");
        cfg.uniform_scaling = j["uniform_scaling"].get<bool>();
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = io::read_text(path);
    } catch (const IoError& e) {
        throw ConfigError("--config", e.what());
    }
    return parse_config(text);
}

void validate(const ExperimentConfig& cfg) {
    auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };

    if (cfg.delta_grid.empty()) throw ConfigError("delta_grid", "must not be empty");
    for (std::size_t i = 0; i < cfg.delta_grid.size(); ++i) {
        const std::string path = "delta_grid[" + std::to_string(i) + "]";
        if (!finite_positive(cfg.delta_grid[i])) throw ConfigError(path, "must be positive and finite");
        if (i > 0 && !(cfg.delta_grid[i] < cfg.delta_grid[i - 1]))
            throw ConfigError(path, "delta_grid must be strictly decreasing");
    }
    if (cfg.paradigms.empty()) throw ConfigError("paradigms", "must not be empty");
    for (std::size_t i = 0; i < cfg.paradigms.size(); ++i) {
        const auto& p = cfg.paradigms[i];
        if ((p.kind == ParadigmKind::adv || p.kind == ParadigmKind::sc) && !finite_positive(p.beta))
            throw ConfigError("paradigms[" + std::to_string(i) + "]", "beta must be > 0");
        if (p.kind == ParadigmKind::truncated_svd && p.k == 0)
            throw ConfigError("paradigms[" + std::to_string(i) + "]", "tsvd needs k >= 1");
    }

    switch (cfg.data.source) {
        case DataSource::analytic:
            if (!(cfg.data.q > 1.0) || !std::isfinite(cfg.data.q))
                throw ConfigError("data.q", "trace-class requirement: q must exceed 1");
            break;
        case DataSource::explicit_decay:
            if (!finite_positive(cfg.data.pi_exponent)) throw ConfigError("data.pi_exponent", "must be > 0");
            break;
        case DataSource::corpus:
            if (cfg.data.corpus_path.empty()) throw ConfigError("data.corpus", "path must not be empty");
            break;
        case DataSource::phantoms:
            if (cfg.data.phantom_count < 1) throw ConfigError("data.phantoms", "must be >= 1");
            if (!std::holds_alternative<RadonSpec>(cfg.op))
                throw ConfigError("data.phantoms", "phantoms need a radon2d operator");
            break;
    }

    if (!(cfg.training.exponent >= 0.0) || !std::isfinite(cfg.training.exponent))
        throw ConfigError("training_noise.exponent", "must be >= 0");
    if (!finite_positive(cfg.training_level)) throw ConfigError("training_noise.level", "must be > 0");
    for (std::size_t i = 0; i < cfg.test_noise.size(); ++i)
        if (!(cfg.test_noise[i].exponent >= 0.0) || !std::isfinite(cfg.test_noise[i].exponent))
            throw ConfigError("test_noise[" + std::to_string(i) + "].exponent", "must be >= 0");
    if (!finite_positive(cfg.perturbation)) throw ConfigError("perturbation", "must be > 0");

    if (const auto* d = std::get_if<DiagonalSpec>(&cfg.op)) {
        if (!(d->decay > 0.0) || !std::isfinite(d->decay)) throw ConfigError("operator.decay", "must be > 0");
        if (d->size < 1) throw ConfigError("operator.size", "must be >= 1");
    } else if (const auto* c = std::get_if<ConvolutionSpec>(&cfg.op)) {
        if (c->kernel.empty()) throw ConfigError("operator.kernel", "must not be empty");
        if (c->length < 1) throw ConfigError("operator.length", "must be >= 1");
    } else if (const auto* r = std::get_if<RadonSpec>(&cfg.op)) {
        if (r->side < 4) throw ConfigError("operator.side", "must be >= 4");
        if (r->angles < 1) throw ConfigError("operator.angles", "must be >= 1");
    }

    switch (cfg.experiment) {
        case ExperimentKind::continuity_sweep:
            if (cfg.dimensions.empty()) throw ConfigError("operator.dimensions", "required for continuity_sweep");
            for (std::size_t i = 0; i < cfg.dimensions.size(); ++i)
                if (cfg.dimensions[i] < 1)
                    throw ConfigError("operator.dimensions[" + std::to_string(i) + "]", "must be >= 1");
            break;
        case ExperimentKind::recon_grid: {
            const auto* r = std::get_if<RadonSpec>(&cfg.op);
            if (r == nullptr) throw ConfigError("operator.kind", "recon_grid needs a radon2d operator");
            if (r->side > 32) throw ConfigError("operator.side", "recon_grid is limited to side <= 32");
            if (cfg.test_noise.empty()) throw ConfigError("test_noise", "must not be empty");
            break;
        }
        case ExperimentKind::convergence_sweep:
        case ExperimentKind::fit_report:
            if (cfg.test_noise.empty()) throw ConfigError("test_noise", "must not be empty");
            break;
    }
}

namespace {

json family_json(const NoiseFamily& f) {
    json j;
    j["family"] = f.family == TrainingFamily::white ? "white" : "power_law";
    j["exponent"] = f.exponent;
    return j;
}

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.experiment);
    json op;
    op["kind"] = operator_kind(cfg.op);
    if (const auto* d = std::get_if<DiagonalSpec>(&cfg.op)) {
        op["decay"] = d->decay;
        op["size"] = d->size;
    } else if (const auto* c = std::get_if<ConvolutionSpec>(&cfg.op)) {
        op["kernel"] = c->kernel;
        op["length"] = c->length;
    } else if (const auto* r = std::get_if<RadonSpec>(&cfg.op)) {
        op["side"] = r->side;
        op["angles"] = r->angles;
        op["detectors"] = r->detector_count();
    }
    if (!cfg.dimensions.empty()) op["dimensions"] = cfg.dimensions;
    j["operator"] = op;
    switch (cfg.data.source) {
        case DataSource::analytic: j["data"] = {{"q", cfg.data.q}}; break;
        case DataSource::explicit_decay: j["data"] = {{"pi_exponent", cfg.data.pi_exponent}}; break;
        case DataSource::corpus: j["data"] = {{"corpus", cfg.data.corpus_path}}; break;
        case DataSource::phantoms: j["data"] = {{"phantoms", cfg.data.phantom_count}}; break;
    }
    json training = family_json(cfg.training);
    training["level"] = cfg.training_level;
    j["training_noise"] = training;
    j["test_noise"] = json::array();
    for (const auto& f : cfg.test_noise) j["test_noise"].push_back(family_json(f));
    j["delta_grid"] = cfg.delta_grid;
    j["paradigms"] = json::array();
    for (const auto& p : cfg.paradigms) j["paradigms"].push_back(p.name());
    j["perturbation"] = cfg.perturbation;
    if (cfg.seed) j["seed"] = *cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["uniform_scaling"] = cfg.uniform_scaling;
    return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, std::optional<std::uint64_t> config,
                           const char* env_value) {
    if (cli) return *cli;
    if (config) return *config;
    if (env_value != nullptr && *env_value != '\0') {
        const std::string_view text(env_value);
        std::uint64_t v = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
            throw ConfigError("SPECREG_SEED", "expected an unsigned integer, got '" + std::string(text) + "'");
        return v;
    }
    return 0;
}

std::string results_csv(std::span<const ResultRow> rows) {
    std::string s(kResultHeader);
    s += '\n';
    for (const auto& r : rows) {
        s += r.experiment + "," + r.paradigm + "," + format_number(r.delta) + "," + r.test_family + "," +
             std::to_string(r.dimension) + "," + format_number(r.data_term) + "," + format_number(r.noise_term) +
             "," + format_number(r.total) + "," + std::to_string(r.seed) + "\n";
    }
    return s;
}

double test_level(const Paradigm& p, double delta, bool uniform_scaling) {
    if (uniform_scaling) return delta;
    return p.kind == ParadigmKind::post || p.kind == ParadigmKind::adv ? delta * delta : delta;
}

std::string file_tag(std::string_view name) {
    std::string s;
    for (char c : name) {
        if (c == '(') s += '-';
        else if (c == ')') continue;
        else if (c == ',' || c == ' ' || c == '/') s += '_';
        else s += c;
    }
    return s;
}

SingularSystem build_system(const OperatorSpec& spec) { return compute_svd(build_operator(spec)); }

namespace {

Vector analytic_sample(const SingularSystem& sys, const SpectrumProfile& pi, std::uint64_t seed) {
    CounterRng rng(seed, Stream::data, 0);
    Vector c(pi.size());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = std::sqrt(pi[n]) * rng.gaussian();
    return synthesize_x(sys, c);
}

OperatorSpec with_dimension(OperatorSpec op, std::size_t n) {
    if (auto* d = std::get_if<DiagonalSpec>(&op)) d->size = n;
    else if (auto* c = std::get_if<ConvolutionSpec>(&op)) c->length = n;
    else if (auto* r = std::get_if<RadonSpec>(&op)) r->side = n;
    return op;
}

std::uint64_t require_seed(const ExperimentConfig& cfg) {
    if (!cfg.seed) throw ConfigError("seed", "not resolved; call resolve_seed first");
    return *cfg.seed;
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg, const OperatorSpec& op, std::uint64_t seed) {
    DenseMatrix matrix = build_operator(op);
    SingularSystem sys = compute_svd(matrix);
    const std::size_t N = sys.n_modes();
    SpectrumProfile pi;
    Vector x;
    switch (cfg.data.source) {
        case DataSource::analytic:
            pi = SpectrumProfile::decay(cfg.data.q, N);
            x = analytic_sample(sys, pi, seed);
            break;
        case DataSource::explicit_decay:
            pi = SpectrumProfile::decay(cfg.data.pi_exponent, N);
            pi.family = ProfileFamily::explicit_values;
            x = analytic_sample(sys, pi, seed);
            break;
        case DataSource::corpus:
        case DataSource::phantoms: {
            std::vector<Vector> samples;
            if (cfg.data.source == DataSource::corpus) {
                try {
                    samples = io::read_corpus_csv(cfg.data.corpus_path);
                } catch (const Error& e) {
                    throw ConfigError("data.corpus", e.what());
                }
                if (samples.front().size() != sys.dim_x())
                    throw ConfigError("data.corpus", "samples have length " + std::to_string(samples.front().size()) +
                                                         ", operator domain has dimension " +
                                                         std::to_string(sys.dim_x()));
            } else {
                samples = sample_data_corpus(op, sys, cfg.data.phantom_count, seed);
            }
            pi = estimate_profile(samples, sys.x_basis());
            x = project_row_space(sys, samples.front());
            break;
        }
    }
    return Problem{op, std::move(matrix), std::move(sys), std::move(pi), std::move(x)};
}

ContinuityResult run_continuity_sweep(const ExperimentConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    ContinuityResult result;
    for (std::size_t dim : cfg.dimensions) {
        const Problem pr = build_problem(cfg, with_dimension(cfg.op, dim), seed);
        const std::size_t N = pr.sys.n_modes();
        const SpectrumProfile training = cfg.training.profile(cfg.training_level, N);
        Vector unit(N, 0.0);
        unit[N - 1] = cfg.perturbation;
        const Vector eps = synthesize_y(pr.sys, unit);
        for (const auto& p : cfg.paradigms) {
            const Filter f = fit_filter(p, pr.sys.sigma(), training, pr.pi);
            const Vector r = reconstruct(eps, f, pr.sys);
            const double sq = dot(r, r);
            result.points.push_back({p.name(), N, std::sqrt(sq), f.sup_g()});
            result.rows.push_back({to_string(cfg.experiment), p.name(), cfg.training_level, "perturbation", N, 0.0,
                                   sq, sq, seed});
        }
    }
    return result;
}

ConvergenceResult run_convergence_sweep(const ExperimentConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    const Problem pr = build_problem(cfg, cfg.op, seed);
    const std::size_t N = pr.sys.n_modes();
    double inv_sigma_sq = 0.0;
    for (double s : pr.sys.sigma()) inv_sigma_sq += 1.0 / (s * s);

    ConvergenceResult result;
    for (double delta : cfg.delta_grid) {
        const SpectrumProfile training = cfg.training.profile(delta, N);
        for (const auto& p : cfg.paradigms) {
            const Filter f = fit_filter(p, pr.sys.sigma(), training, pr.pi);
            const double level = test_level(p, delta, cfg.uniform_scaling);
            for (const auto& fam : cfg.test_noise) {
                const ErrorReport e = expected_error(f, pr.sys, pr.x, fam.profile(level, N));
                ConvergenceCell cell;
                cell.row = {to_string(cfg.experiment), p.name(), delta, fam.label(), N,
                            e.data_term, e.noise_term, e.total, seed};
                cell.test_level = level;
                cell.noise_bound = level * level * inv_sigma_sq;
                result.cells.push_back(std::move(cell));
            }
        }
    }

    const double floor = 10.0 * std::numeric_limits<double>::epsilon();
    for (const auto& p : cfg.paradigms) {
        for (const auto& fam : cfg.test_noise) {
            std::vector<double> deltas, levels, totals;
            for (const auto& c : result.cells) {
                if (c.row.paradigm != p.name() || c.row.test_family != fam.label()) continue;
                if (!(c.row.noise_term > floor)) continue;
                deltas.push_back(c.row.delta);
                levels.push_back(c.test_level);
                totals.push_back(c.row.total);
            }
            const SlopeFit vs_delta = fit_loglog_slope(deltas, totals);
            const SlopeFit vs_level = fit_loglog_slope(levels, totals);
            result.slopes.push_back({p.name(), fam.label(), vs_delta.slope, vs_level.slope, vs_delta.points});
        }
    }
    return result;
}

ReconResult run_recon_grid(const ExperimentConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    const Problem pr = build_problem(cfg, cfg.op, seed);
    const auto& radon = std::get<RadonSpec>(cfg.op);
    const std::size_t N = pr.sys.n_modes();

    ReconResult result;
    result.side = radon.side;
    result.ground_truth = generate_phantom(radon.side, CounterRng(seed, Stream::phantom, 0).next_u64()).pixels;
    const Vector clean = pr.matrix.apply(result.ground_truth);

    for (std::size_t d = 0; d < cfg.delta_grid.size(); ++d) {
        const double delta = cfg.delta_grid[d];
        const SpectrumProfile training = cfg.training.profile(delta, N);
        for (const auto& p : cfg.paradigms) {
            const Filter f = fit_filter(p, pr.sys.sigma(), training, pr.pi);
            const double level = test_level(p, delta, cfg.uniform_scaling);
            for (std::size_t fi = 0; fi < cfg.test_noise.size(); ++fi) {
                const auto& fam = cfg.test_noise[fi];
                // One standard-normal draw per family, shared across paradigms
                // and levels, so cells differ only by filter and scale.
                const NoiseModel noise{fam.profile(level, N), NoiseSide::y_side, std::nullopt};
                Vector y = sample_noise(noise, pr.sys, seed, fi);
                for (std::size_t i = 0; i < y.size(); ++i) y[i] += clean[i];
                ReconImage img;
                img.paradigm = p.name();
                img.test_family = fam.label();
                img.delta = delta;
                img.pixels = reconstruct(y, f, pr.sys);
                double err = 0.0;
                for (std::size_t i = 0; i < img.pixels.size(); ++i) {
                    const double diff = img.pixels[i] - result.ground_truth[i];
                    err += diff * diff;
                }
                img.squared_error = err;
                img.file = file_tag(img.paradigm) + "_" + file_tag(img.test_family) + "_" + format_number(delta) +
                           ".pgm";
                result.images.push_back(std::move(img));
            }
        }
    }
    return result;
}

FitReport run_fit_report(const ExperimentConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    const Problem pr = build_problem(cfg, cfg.op, seed);
    const std::size_t N = pr.sys.n_modes();
    FitReport report;
    report.delta = cfg.delta_grid.front();
    const SpectrumProfile training = cfg.training.profile(report.delta, N);
    const NoiseFamily& test_family = cfg.test_noise.front();

    for (const auto& p : cfg.paradigms) {
        FitEntry e;
        e.filter = fit_filter(p, pr.sys.sigma(), training, pr.pi);
        const SpectrumProfile test = test_family.profile(test_level(p, report.delta, cfg.uniform_scaling), N);
        if (p.kind != ParadigmKind::pseudo_inverse && p.kind != ParadigmKind::truncated_svd) {
            ConditionInputs in;
            in.sigma = pr.sys.sigma();
            in.pi = &pr.pi;
            in.training = &training;
            in.test = &test;
            e.continuity = check_condition(p, ConditionId::continuity, in);
            e.convergence = check_condition(p, ConditionId::convergence, in);
        }
        e.bias = bias(e.filter, pr.pi);
        e.sup_g = e.filter.sup_g();
        e.lipschitz = lipschitz_condition_holds(e.filter);
        const ErrorReport err = expected_error(e.filter, pr.pi, test);
        e.row = {to_string(cfg.experiment), p.name(), report.delta, test_family.label(), N,
                 err.data_term, err.noise_term, err.total, seed};
        report.entries.push_back(std::move(e));
    }
    return report;
}

namespace {

json condition_json(const std::optional<ConditionReport>& r) {
    if (!r) return nullptr;
    return json::parse(to_json(*r));
}

class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

    void text(const std::string& relative, std::string_view content) {
        io::write_text(root_ / relative, content);
        files_.push_back(relative);
    }
    void pgm(const std::string& relative, std::size_t side, std::span<const double> pixels) {
        io::write_pgm16(root_ / relative, side, side, pixels);
        files_.push_back(relative);
    }
    void grid_csv(const std::string& relative, std::size_t side, std::span<const double> pixels) {
        io::write_grid_csv(root_ / relative, side, side, pixels);
        files_.push_back(relative);
    }
    void filter(const std::string& relative_csv, const Filter& f) {
        text(relative_csv, io::filter_csv(f));
        fs::path sidecar = relative_csv;
        sidecar.replace_extension(".json");
        text(sidecar.generic_string(), io::filter_sidecar_json(f));
    }

    const fs::path& root() const { return root_; }
    std::vector<std::string> files() const {
        auto out = files_;
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    fs::path root_;
    std::vector<std::string> files_;
};

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::uint64_t seed = require_seed(cfg);
    ArtifactWriter out(cfg.output_dir);

    switch (cfg.experiment) {
        case ExperimentKind::continuity_sweep: {
            const auto r = run_continuity_sweep(cfg);
            out.text("results.csv", results_csv(r.rows));
            std::string s = "paradigm,dimension,reconstruction_norm,sup_g\n";
            for (const auto& p : r.points)
                s += p.paradigm + "," + std::to_string(p.dimension) + "," + format_number(p.reconstruction_norm) +
                     "," + format_number(p.sup_g) + "\n";
            out.text("continuity.csv", s);
            break;
        }
        case ExperimentKind::convergence_sweep: {
            const auto r = run_convergence_sweep(cfg);
            std::vector<ResultRow> rows;
            for (const auto& c : r.cells) rows.push_back(c.row);
            out.text("results.csv", results_csv(rows));
            std::string s = "paradigm,test_family,slope_vs_delta,slope_vs_test_level,points\n";
            for (const auto& sl : r.slopes)
                s += sl.paradigm + "," + sl.test_family + "," + format_number(sl.slope_vs_delta) + "," +
                     format_number(sl.slope_vs_test_level) + "," + std::to_string(sl.points) + "\n";
            out.text("slopes.csv", s);
            break;
        }
        case ExperimentKind::recon_grid: {
            const auto r = run_recon_grid(cfg);
            out.pgm("ground_truth.pgm", r.side, r.ground_truth);
            out.grid_csv("ground_truth.csv", r.side, r.ground_truth);
            std::string s = "file,paradigm,test_family,delta,squared_error,seed\n";
            for (const auto& img : r.images) {
                out.pgm(img.file, r.side, img.pixels);
                s += img.file + "," + img.paradigm + "," + img.test_family + "," + format_number(img.delta) + "," +
                     format_number(img.squared_error) + "," + std::to_string(seed) + "\n";
            }
            out.text("recon_index.csv", s);
            break;
        }
        case ExperimentKind::fit_report: {
            const auto r = run_fit_report(cfg);
            std::vector<ResultRow> rows;
            json report;
            report["delta"] = r.delta;
            report["entries"] = json::array();
            for (const auto& e : r.entries) {
                rows.push_back(e.row);
                const std::string csv = "filters/" + file_tag(e.filter.paradigm.name()) + ".csv";
                out.filter(csv, e.filter);
                report["entries"].push_back({{"paradigm", e.filter.paradigm.name()},
                                             {"filter_csv", csv},
                                             {"bias", e.bias},
                                             {"sup_g", e.sup_g},
                                             {"lipschitz_condition", e.lipschitz},
                                             {"flagged_modes", e.filter.flagged_modes},
                                             {"continuity", condition_json(e.continuity)},
                                             {"convergence", condition_json(e.convergence)}});
            }
            out.text("results.csv", results_csv(rows));
            out.text("fit_report.json", report.dump(2) + "\n");
            break;
        }
    }

    RunSummary summary;
    summary.output_dir = out.root();
    summary.seed = seed;
    summary.artifacts = out.files();

    json manifest;
    manifest["experiment"] = to_string(cfg.experiment);
    manifest["seed"] = seed;
    manifest["config"] = config_json(cfg);
    manifest["artifacts"] = json::array();
    for (const auto& f : summary.artifacts)
        manifest["artifacts"].push_back({{"path", f}, {"fnv1a64", io::file_hash(out.root() / f)}});
    io::write_text(out.root() / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

}  // namespace specreg::harness
