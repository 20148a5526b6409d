// Command-line front end: dataset generation, scenario runs, case comparison,
// sigma_D sweeps, plot data and consistency reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "epiassim/errors.hpp"
#include "epiassim/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace epiassim;

namespace {

/// Scenario flags; each one set on the command line overrides the config file.
struct ScenarioFlags {
    std::optional<std::string> config_file;
    std::optional<std::string> dataset;
    std::optional<std::string> mode;
    std::optional<std::string> obs_case;
    std::optional<std::uint64_t> n_ensemble;
    std::optional<double> sigma_c, sigma_d, sigma_e;
    std::optional<std::uint64_t> seed, replicates, data_seed;
    std::optional<int> horizon_years;
    std::optional<std::string> noise_kind;
    std::optional<double> noise_sigma;
    std::optional<std::vector<double>> prior_s, prior_i, prior_b0, prior_b1, prior_beta;

    void attach(CLI::App& app, bool filter_flags = true)
    {
        app.add_option("--config", config_file, "JSON scenario file");
        app.add_option("--data-seed", data_seed, "seed of the synthetic data noise");
        app.add_option("--horizon-years", horizon_years, "years of monthly data");
        app.add_option("--noise-kind", noise_kind, "additive | multiplicative");
        app.add_option("--noise-sigma", noise_sigma, "data noise standard deviation");
        if (!filter_flags) return;
        app.add_option("--dataset", dataset, "dataset JSON written by 'generate'");
        app.add_option("--mode", mode, "state | constant_params | tracking");
        app.add_option("--case", obs_case, "observation case 1-4 or its name");
        app.add_option("--n-ensemble", n_ensemble, "ensemble size");
        app.add_option("--sigma-c", sigma_c, "process noise standard deviation");
        app.add_option("--sigma-d", sigma_d, "observation noise standard deviation");
        app.add_option("--sigma-e", sigma_e, "parameter drift standard deviation");
        app.add_option("--seed", seed, "base filter seed");
        app.add_option("--replicates", replicates, "independent filter runs");
        app.add_option("--prior-s", prior_s, "S(0) prior factor interval")->expected(2);
        app.add_option("--prior-i", prior_i, "I(0) prior factor interval")->expected(2);
        app.add_option("--prior-b0", prior_b0, "b0 prior interval")->expected(2);
        app.add_option("--prior-b1", prior_b1, "b1 prior interval")->expected(2);
        app.add_option("--prior-beta", prior_beta, "beta(0) prior interval")->expected(2);
    }

    ScenarioConfig resolve(ScenarioConfig base = {}) const
    {
        if (config_file) base = load_scenario(*config_file, std::move(base));
        json j = json::object();
        json ds = json::object();
        if (dataset) ds["path"] = *dataset;
        if (data_seed) ds["seed"] = *data_seed;
        if (horizon_years) ds["horizon_years"] = *horizon_years;
        if (noise_kind || noise_sigma) {
            json noise = json::object();
            if (noise_kind) noise["kind"] = *noise_kind;
            if (noise_sigma) noise["sigma"] = *noise_sigma;
            ds["noise"] = noise;
        }
        if (!ds.empty()) j["dataset"] = ds;
        if (mode) j["mode"] = *mode;
        if (obs_case) j["case"] = *obs_case;
        if (n_ensemble) j["n_ensemble"] = *n_ensemble;
        if (sigma_c) j["sigma_c"] = *sigma_c;
        if (sigma_d) j["sigma_d"] = *sigma_d;
        if (sigma_e) j["sigma_e"] = *sigma_e;
        if (seed) j["seed"] = *seed;
        if (replicates) j["replicates"] = *replicates;
        json priors = json::object();
        if (prior_s) priors["s_factor"] = *prior_s;
        if (prior_i) priors["i_factor"] = *prior_i;
        if (prior_b0) priors["b0"] = *prior_b0;
        if (prior_b1) priors["b1"] = *prior_b1;
        if (prior_beta) priors["beta"] = *prior_beta;
        if (!priors.empty()) j["priors"] = priors;
        return scenario_from_json(j, std::move(base));
    }
};

std::vector<ObservationCase> parse_cases(const std::vector<std::string>& names)
{
    std::vector<ObservationCase> out;
    for (const std::string& n : names) {
        try {
            out.push_back(parse_observation_case(n));
        } catch (const DomainError& e) {
            throw ConfigError(std::string("cases: ") + e.what());
        }
    }
    return out;
}

void write_json(const json& j, const fs::path& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("output: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_panels(const PanelSet& panels, const fs::path& dir, const std::string& figure, bool svg)
{
    fs::create_directories(dir);
    for (const auto& [name, table] : panels) {
        write_csv(table, dir / (name + ".csv"));
        if (svg) {
            std::ofstream out(dir / (name + ".svg"));
            write_svg(table, figure + " " + name, out);
        }
        std::cout << (dir / (name + ".csv")).string() << '\n';
    }
}

void print_scores(const json& summary)
{
    const json& agg = summary.at("aggregate");
    std::printf("config %s seed %llu replicates %zu\n", summary.at("config_hash").get<std::string>().c_str(),
                static_cast<unsigned long long>(summary.at("seed").get<std::uint64_t>()),
                summary.at("replicates").size());
    for (const auto& [name, stats] : agg.items()) {
        std::printf("  %-18s mean %.6g  median %.6g  sd %.6g\n", name.c_str(), stats.at("mean").get<double>(),
                    stats.at("median").get<double>(), stats.at("sd").get<double>());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ensemble Kalman filtering of a seasonal SIR model under different observation functions"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned workers = 1;
    std::string out = "out";
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output directory (or file for 'generate')");

    ScenarioFlags gen_flags, run_flags, cmp_flags, sweep_flags, plot_flags, cons_flags;

    CLI::App* generate = app.add_subcommand("generate", "generate a synthetic dataset");
    gen_flags.attach(*generate, false);
    std::optional<std::string> csv_path;
    generate->add_option("--csv", csv_path, "also write time,observation CSV");

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run_flags.attach(*run);

    CLI::App* compare = app.add_subcommand("compare", "run all observation cases on one dataset");
    cmp_flags.attach(*compare);
    std::vector<std::string> compare_cases_arg{"4", "3", "2", "1"};
    compare->add_option("--cases", compare_cases_arg, "cases to compare");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep the observation noise sigma_D");
    sweep_flags.attach(*sweep);
    SweepOptions sweep_options;
    std::optional<std::vector<std::string>> sweep_cases;
    sweep->add_option("--values", sweep_options.sigma_d, "sigma_D grid");
    sweep->add_option("--cases", sweep_cases, "cases to sweep");
    sweep->add_option("--mse-replicates", sweep_options.mse_replicates, "runs averaged for MSE");
    sweep->add_option("--gamma-replicates", sweep_options.gamma_replicates, "runs averaged for gamma");

    CLI::App* plot = app.add_subcommand("plot-data", "emit the data behind a figure");
    plot_flags.attach(*plot);
    std::string figure;
    std::optional<std::string> artifact_path;
    std::size_t plot_replicates = 10;
    bool svg = false;
    plot->add_option("--figure", figure, "fig3 figA1 fig4 .. fig11 figB1")->required();
    plot->add_option("--artifact", artifact_path, "artifact.json from 'run' instead of running afresh");
    plot->add_option("--sweep-replicates", plot_replicates, "replicates for sweep figures");
    plot->add_flag("--svg", svg, "also render SVG line charts");

    CLI::App* consistency = app.add_subcommand("consistency", "filter consistency gamma per run");
    cons_flags.attach(*consistency);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) {
            const ScenarioConfig config = gen_flags.resolve();
            const SyntheticDataset data = generate_dataset(config.dataset);
            const fs::path path = out == "out" ? fs::path("dataset.json") : fs::path(out);
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            write_dataset_json(data, path);
            if (csv_path) {
                std::ofstream csv(*csv_path);
                if (!csv) throw ConfigError("csv: cannot write " + *csv_path);
                write_observations_csv(data, csv);
            }
            std::printf("%zu observations -> %s\n", data.size(), path.string().c_str());
        } else if (run->parsed()) {
            const RunArtifact artifact = run_scenario(run_flags.resolve(), workers);
            write_run_outputs(artifact, out);
            print_scores(summary_json(artifact));
        } else if (compare->parsed()) {
            const std::vector<ObservationCase> cases = parse_cases(compare_cases_arg);
            const std::vector<RunArtifact> runs = compare_cases(cmp_flags.resolve(), cases, workers);
            CsvTable table{{"case", "mse_s_mean", "mse_s_median", "mse_i_mean", "mse_i_median", "gamma_mean"}, {}};
            for (const RunArtifact& a : runs) {
                const fs::path dir = fs::path(out) / ("case" + std::to_string(case_number(a.config.obs_case)));
                write_run_outputs(a, dir);
                const json s = summary_json(a);
                const json& agg = s.at("aggregate");
                table.rows.push_back({static_cast<double>(case_number(a.config.obs_case)),
                                      agg["mse_s"]["mean"].get<double>(), agg["mse_s"]["median"].get<double>(),
                                      agg["mse_i"]["mean"].get<double>(), agg["mse_i"]["median"].get<double>(),
                                      agg["gamma"]["mean"].get<double>()});
                std::printf("case %d: ", case_number(a.config.obs_case));
                print_scores(s);
            }
            write_csv(table, fs::path(out) / "compare.csv");
        } else if (sweep->parsed()) {
            if (sweep_cases) sweep_options.cases = parse_cases(*sweep_cases);
            const SweepResult result = sweep_sigma_d(sweep_flags.resolve(), sweep_options, workers);
            fs::create_directories(out);
            write_json(sweep_json(result), fs::path(out) / "sweep.json");
            CsvTable table{{"case", "sigma_d", "mean_mse_s", "mean_mse_i", "mean_gamma"}, {}};
            for (const SweepCell& c : result.cells) {
                table.rows.push_back({static_cast<double>(case_number(c.obs_case)), c.sigma_d, c.mean_mse_s,
                                      c.mean_mse_i, c.mean_gamma});
                std::printf("case %d sigma_d %-5g MSE_S %.6g MSE_I %.6g gamma %.4f\n", case_number(c.obs_case),
                            c.sigma_d, c.mean_mse_s, c.mean_mse_i, c.mean_gamma);
            }
            write_csv(table, fs::path(out) / "sweep.csv");
        } else if (plot->parsed()) {
            const PanelSet panels = artifact_path
                                        ? emit_plot_data(read_artifact(*artifact_path), figure)
                                        : generate_figure(figure, plot_flags.resolve(), plot_replicates, workers);
            write_panels(panels, fs::path(out) / figure, figure, svg);
        } else if (consistency->parsed()) {
            ScenarioConfig base;
            base.replicates = 5;
            const ConsistencyResult result = consistency_check(cons_flags.resolve(base), workers);
            json runs = json::array();
            for (std::size_t r = 0; r < result.runs.size(); ++r) {
                const ConsistencyReport& rep = result.runs[r];
                runs.push_back({{"gamma", rep.gamma}, {"used", rep.used}, {"excluded", rep.excluded}});
                std::printf("run %zu gamma %.6f (excluded %zu)\n", r, rep.gamma, rep.excluded);
            }
            std::printf("mean gamma %.6f\n", result.mean_gamma);
            fs::create_directories(out);
            write_json({{"config", scenario_to_json(result.config)},
                        {"config_hash", config_hash(result.config)},
                        {"seed", result.config.seed},
                        {"runs", runs},
                        {"mean_gamma", result.mean_gamma}},
                       fs::path(out) / "consistency.json");
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
