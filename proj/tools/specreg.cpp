// specreg: command-line front end for the spectral regularization library.
//
//   specreg svd --matrix A.csv | --config cfg.json [--out DIR]
//   specreg fit --config cfg.json [--seed S] [--out DIR]
//   specreg reconstruct --system S.svdsys --filter F.csv --input y.csv [--out DIR]
//   specreg experiment <name> [--config cfg.json] [--seed S] [--out DIR] [--uniform-scaling]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
// 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specreg/error.hpp"
#include "specreg/harness.hpp"
#include "specreg/io.hpp"
#include "specreg/learners.hpp"
#include "specreg/singular_system.hpp"

namespace fs = std::filesystem;
using namespace specreg;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool uniform_scaling = false;
};

harness::ExperimentConfig load_or_default(const CommonOptions& opts, std::optional<harness::ExperimentKind> kind) {
    harness::ExperimentConfig cfg;
    if (!opts.config.empty()) {
        cfg = harness::load_config(opts.config);
        if (kind && cfg.experiment != *kind)
            throw ConfigError("experiment", "config names '" + harness::to_string(cfg.experiment) +
                                                "' but the command asks for '" + harness::to_string(*kind) + "'");
    } else if (kind) {
        cfg = harness::default_config(*kind);
    } else {
        throw ConfigError("--config", "required");
    }
    cfg.seed = harness::resolve_seed(opts.seed, cfg.seed, std::getenv("SPECREG_SEED"));
    if (!opts.out.empty()) cfg.output_dir = opts.out;
    if (opts.uniform_scaling) cfg.uniform_scaling = true;
    harness::validate(cfg);
    return cfg;
}

void write_sigma(const fs::path& path, const SingularSystem& sys) {
    std::string s = "n,value\n";
    for (std::size_t n = 0; n < sys.n_modes(); ++n)
        s += std::to_string(n + 1) + "," + io::format_number(sys.sigma(n)) + "\n";
    io::write_text(path, s);
}

int run_svd(const std::string& matrix_path, const CommonOptions& opts) {
    const fs::path out = opts.out.empty() ? fs::path("specreg-out") : fs::path(opts.out);
    SingularSystem sys = [&] {
        if (!matrix_path.empty()) return compute_svd(io::read_matrix_csv(matrix_path));
        const auto cfg = load_or_default(opts, std::nullopt);
        return harness::build_system(cfg.op);
    }();
    fs::create_directories(out);
    save_system(sys, out / "system.svdsys");
    write_sigma(out / "sigma.csv", sys);
    std::cout << "modes " << sys.n_modes() << ", sigma_1 " << io::format_number(sys.sigma(0)) << ", sigma_N "
              << io::format_number(sys.sigma(sys.n_modes() - 1)) << "\nwrote " << (out / "system.svdsys").string()
              << "\n";
    return 0;
}

int run_fit(const CommonOptions& opts) {
    auto cfg = load_or_default(opts, std::nullopt);
    cfg.experiment = harness::ExperimentKind::fit_report;
    harness::validate(cfg);
    const auto summary = harness::run_experiment(cfg);
    save_system(harness::build_system(cfg.op), summary.output_dir / "system.svdsys");
    std::cout << "seed " << summary.seed << ", " << summary.artifacts.size() << " artifacts in "
              << summary.output_dir.string() << "\n";
    return 0;
}

int run_reconstruct(const std::string& system_path, const std::string& filter_path, const std::string& input_path,
                    const CommonOptions& opts) {
    const SingularSystem sys = load_system(system_path);
    const Filter f = io::read_filter(filter_path);
    const Vector y = io::read_vector_csv(input_path);
    if (y.size() != sys.dim_y())
        throw DimensionError("input has " + std::to_string(y.size()) + " entries, the system expects " +
                             std::to_string(sys.dim_y()));
    const Vector x = reconstruct(y, f, sys);
    const fs::path out = opts.out.empty() ? fs::path("specreg-out") : fs::path(opts.out);
    io::write_vector_csv(out / "reconstruction.csv", x);
    std::cout << "wrote " << (out / "reconstruction.csv").string() << "\n";
    return 0;
}

int run_named_experiment(const std::string& name, const CommonOptions& opts) {
    const auto cfg = load_or_default(opts, harness::parse_experiment(name));
    const auto summary = harness::run_experiment(cfg);
    std::cout << harness::to_string(cfg.experiment) << ": seed " << summary.seed << ", "
              << summary.artifacts.size() << " artifacts in " << summary.output_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven spectral regularization of linear inverse problems"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string matrix_path, system_path, filter_path, input_path, experiment_name;

    auto add_common = [&](CLI::App* cmd, bool with_seed) {
        cmd->add_option("--config", opts.config, "Experiment configuration (JSON)");
        cmd->add_option("--out", opts.out, "Output directory");
        if (with_seed) cmd->add_option("--seed", opts.seed, "Seed (overrides config and SPECREG_SEED)");
    };

    auto* svd = app.add_subcommand("svd", "Singular system of a matrix CSV or a configured operator");
    svd->add_option("--matrix", matrix_path, "Matrix CSV: 'rows,cols' header, then one row per line");
    add_common(svd, false);

    auto* fit = app.add_subcommand("fit", "Fit the configured paradigms and write filter CSVs");
    add_common(fit, true);

    auto* rec = app.add_subcommand("reconstruct", "Apply a fitted filter to a measurement vector");
    rec->add_option("--system", system_path, "Binary singular system")->required();
    rec->add_option("--filter", filter_path, "Filter CSV (n,sigma,lambda,g)")->required();
    rec->add_option("--input", input_path, "Measurement vector")->required();
    rec->add_option("--out", opts.out, "Output directory");

    auto* exp = app.add_subcommand("experiment", "Run continuity_sweep, convergence_sweep, recon_grid or fit_report");
    exp->add_option("name", experiment_name, "Experiment name")->required();
    add_common(exp, true);
    exp->add_flag("--uniform-scaling", opts.uniform_scaling, "Test every paradigm at noise level delta");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*svd) return run_svd(matrix_path, opts);
        if (*fit) return run_fit(opts);
        if (*rec) return run_reconstruct(system_path, filter_path, input_path, opts);
        if (*exp) return run_named_experiment(experiment_name, opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const AssumptionError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const EmptySpectrumError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ResourceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
