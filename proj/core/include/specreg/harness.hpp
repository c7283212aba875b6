#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specreg/diagnostics.hpp"
#include "specreg/learners.hpp"
#include "specreg/operators.hpp"
#include "specreg/singular_system.hpp"
#include "specreg/stochastics.hpp"

namespace specreg::harness {

enum class ExperimentKind { continuity_sweep, convergence_sweep, recon_grid, fit_report };

std::string to_string(ExperimentKind kind);
/// Throws ConfigError with field "experiment".
ExperimentKind parse_experiment(std::string_view name);

/// White (exponent 0) or power-law noise: Delta_n = level^2 n^-exponent.
struct NoiseFamily {
    TrainingFamily family = TrainingFamily::white;
    double exponent = 0.0;

    /// "white", "power_law(0.5)", ...
    std::string label() const;
    SpectrumProfile profile(double level, std::size_t n_modes) const;
};

enum class DataSource {
    /// Pi_n = n^-q with q > 1.
    analytic,
    /// Pi_n = n^-p for any p > 0; a finite-N profile that may violate the
    /// trace-class requirement as N grows.
    explicit_decay,
    /// Sample vectors read from a CSV file, one per line.
    corpus,
    /// Random ellipse phantoms (radon2d only).
    phantoms,
};

struct DataSpec {
    DataSource source = DataSource::analytic;
    double q = 2.0;
    double pi_exponent = 1.0;
    std::string corpus_path;
    std::size_t phantom_count = 64;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::convergence_sweep;
    OperatorSpec op = DiagonalSpec{};
    /// Continuity sweep only: operator sizes (diagonal size, convolution
    /// length or radon side).
    std::vector<std::size_t> dimensions;
    DataSpec data;
    NoiseFamily training{TrainingFamily::power_law, 0.5};
    /// Fixed training level for the continuity sweep.
    double training_level = 0.001;
    /// Amplitude of the continuity perturbation along the last v_n.
    double perturbation = 0.001;
    std::vector<NoiseFamily> test_noise;
    std::vector<double> delta_grid;
    std::vector<Paradigm> paradigms;
    std::optional<std::uint64_t> seed;
    std::string output_dir = "specreg-out";
    bool uniform_scaling = false;
};

/// The documented defaults for each experiment.
ExperimentConfig default_config(ExperimentKind kind);

/// Fields missing from the JSON keep the defaults of the named experiment.
/// Throws ConfigError naming the offending field path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);
/// Canonical JSON echo, used in the manifest.
std::string config_to_json(const ExperimentConfig& cfg);

/// Precedence: command line, config file, environment text, 0.
/// Throws ConfigError when the environment value is not an unsigned integer.
std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, std::optional<std::uint64_t> config,
                           const char* env_value);

struct ResultRow {
    std::string experiment;
    std::string paradigm;
    double delta = 0.0;
    std::string test_family;
    std::size_t dimension = 0;
    double data_term = 0.0;
    double noise_term = 0.0;
    double total = 0.0;
    std::uint64_t seed = 0;
};

inline constexpr std::string_view kResultHeader =
    "experiment,paradigm,delta,test_family,dimension,data_term,noise_term,total,seed";
std::string results_csv(std::span<const ResultRow> rows);

/// Test-noise level for a paradigm at training level delta: delta^2 for
/// post / adv, delta otherwise; delta for every paradigm when uniform.
double test_level(const Paradigm& p, double delta, bool uniform_scaling);

/// Filename-safe paradigm / family tag: "adv(0.375)" -> "adv-0.375".
std::string file_tag(std::string_view name);

SingularSystem build_system(const OperatorSpec& spec);

struct Problem {
    OperatorSpec op;
    DenseMatrix matrix;
    SingularSystem sys;
    SpectrumProfile pi;
    /// Fixed ground truth in the row space.
    Vector x;
};
/// Operator, singular system, data profile and fixed x for `cfg`.
Problem build_problem(const ExperimentConfig& cfg, const OperatorSpec& op, std::uint64_t seed);

struct ContinuityPoint {
    std::string paradigm;
    std::size_t dimension = 0;
    double reconstruction_norm = 0.0;
    double sup_g = 0.0;
};
struct ContinuityResult {
    std::vector<ResultRow> rows;
    std::vector<ContinuityPoint> points;
};
ContinuityResult run_continuity_sweep(const ExperimentConfig& cfg);

struct ConvergenceCell {
    ResultRow row;
    double test_level = 0.0;
    /// delta(nu)^2 * sum_n sigma_n^-2
    double noise_bound = 0.0;
};
struct SlopeRow {
    std::string paradigm;
    std::string test_family;
    double slope_vs_delta = 0.0;
    double slope_vs_test_level = 0.0;
    std::size_t points = 0;
};
struct ConvergenceResult {
    std::vector<ConvergenceCell> cells;
    std::vector<SlopeRow> slopes;
};
/// Closed-form errors for the fixed x. Slopes use only the grid points whose
/// noise_term exceeds 10 machine epsilons.
ConvergenceResult run_convergence_sweep(const ExperimentConfig& cfg);

struct ReconImage {
    std::string file;
    std::string paradigm;
    std::string test_family;
    double delta = 0.0;
    double squared_error = 0.0;
    Vector pixels;
};
struct ReconResult {
    std::size_t side = 0;
    Vector ground_truth;
    std::vector<ReconImage> images;
};
ReconResult run_recon_grid(const ExperimentConfig& cfg);

struct FitEntry {
    Filter filter;
    std::optional<ConditionReport> continuity;
    std::optional<ConditionReport> convergence;
    double bias = 0.0;
    double sup_g = 0.0;
    bool lipschitz = false;
    ResultRow row;
};
struct FitReport {
    double delta = 0.0;
    std::vector<FitEntry> entries;
};
FitReport run_fit_report(const ExperimentConfig& cfg);

struct RunSummary {
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
    /// Relative paths of every file written, manifest excluded.
    std::vector<std::string> artifacts;
};
/// Runs the configured experiment and writes its artifacts plus
/// manifest.json into cfg.output_dir. cfg.seed must be set.
RunSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace specreg::harness
