#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "epiassim/errors.hpp"
#include "epiassim/harness.hpp"

namespace epiassim {

namespace {

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_short(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string case_tag(ObservationCase c) { return "case" + std::to_string(case_number(c)); }

using C = ObservationCase;

}  // namespace

void write_csv(const CsvTable& table, std::ostream& out)
{
    for (std::size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw LengthMismatch("write_csv: row width differs from header");
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
        out << '\n';
    }
}

void write_csv(const CsvTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("output: cannot write " + path.string());
    write_csv(table, out);
}

CsvTable series_table(const ReplicateRun& run, const SyntheticDataset& data)
{
    CsvTable t;
    t.header = {"time", "datum", "truth_S", "truth_I", "truth_cases", "truth_beta"};
    for (const std::string& c : run.components) {
        t.header.push_back(c + "_mean");
        t.header.push_back(c + "_sd");
    }
    for (const char* h : {"obs_estimate_mean", "obs_estimate_sd", "nu", "phi_yy", "d_obs"}) t.header.push_back(h);

    const auto ts = data.truth_s_at_observations();
    const auto ti = data.truth_i_at_observations();
    const auto tb = data.truth_beta_at_observations();
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        std::vector<double> row{run.times[k], run.data[k], ts[k], ti[k], data.truth_monthly_cases[k], tb[k]};
        for (const std::string& c : run.components) {
            const Band& b = run.band(c);
            row.push_back(b.mean[k]);
            row.push_back(b.sd[k]);
        }
        const InnovationRecord& in = run.innovations[k];
        for (const double v : {run.obs_estimate.mean[k], run.obs_estimate.sd[k], in.nu, in.phi_yy, in.d_obs}) {
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

FigureSpec figure_spec(std::string_view id)
{
    const std::vector<std::string> states{"S", "I", "C"};
    const std::vector<std::string> constants{"S", "I", "C", "b0", "b1"};
    const std::vector<std::string> tracked{"S", "I", "C", "beta"};
    const std::vector<C> all{C::UnderReportedIncidence, C::Incidence, C::UnderReportedPrevalence, C::Prevalence};
    const std::vector<C> three{C::UnderReportedIncidence, C::Incidence, C::UnderReportedPrevalence};

    if (id == "fig3") return {"fig3", FigureKind::Dataset, FilterMode::State, {}, 1.0, {}};
    if (id == "figA1") return {"figA1", FigureKind::NoiseModels, FilterMode::State, {}, 1.0, {}};
    if (id == "fig4") return {"fig4", FigureKind::Run, FilterMode::State, all, 1.0, states};
    if (id == "fig5") return {"fig5", FigureKind::Run, FilterMode::ConstantParams, {C::UnderReportedIncidence}, 1.0, constants};
    if (id == "fig6") return {"fig6", FigureKind::Run, FilterMode::ConstantParams, {C::Incidence}, 1.0, constants};
    if (id == "fig7") return {"fig7", FigureKind::Run, FilterMode::Tracking, {C::UnderReportedIncidence}, 1.0, tracked};
    if (id == "fig8") return {"fig8", FigureKind::Run, FilterMode::Tracking, {C::Incidence}, 1.0, tracked};
    if (id == "fig9") return {"fig9", FigureKind::Sweep, FilterMode::State, three, 1.0, {}};
    if (id == "fig10") return {"fig10", FigureKind::Run, FilterMode::State, three, 10.0, states};
    if (id == "fig11") return {"fig11", FigureKind::Run, FilterMode::ConstantParams, {C::Incidence}, 25.0, constants};
    if (id == "figB1") return {"figB1", FigureKind::Sweep, FilterMode::State, all, 1.0, {}};
    throw ConfigError("figure: unknown id '" + std::string(id) + "'");
}

std::vector<std::string> figure_ids()
{
    return {"fig3", "figA1", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "figB1"};
}

PanelSet run_panels(const RunArtifact& artifact, std::span<const std::string> components, std::size_t replicate)
{
    if (replicate >= artifact.runs.size()) throw DomainError("run_panels: replicate out of range");
    const ReplicateRun& run = artifact.runs[replicate];
    const SyntheticDataset& data = artifact.dataset;
    PanelSet panels;
    for (const std::string& name : components) {
        const Band& band = run.band(name);
        std::vector<double> truth;
        if (name == component::susceptible) truth = data.truth_s_at_observations();
        else if (name == component::infectious) truth = data.truth_i_at_observations();
        else if (name == component::incidence) truth = data.truth_monthly_cases;
        else if (name == component::beta) truth = data.truth_beta_at_observations();
        else if (name == component::b0) truth.assign(run.times.size(), data.params.b0);
        else if (name == component::b1) truth.assign(run.times.size(), data.params.b1);
        else throw MissingSeries(name + " (no truth)");

        const bool with_data = name == component::incidence;
        CsvTable t;
        t.header = {"time", "truth", "mean", "lo2sd", "hi2sd"};
        if (with_data) t.header.push_back("data");
        for (std::size_t k = 0; k < run.times.size(); ++k) {
            std::vector<double> row{run.times[k], truth[k], band.mean[k], band.mean[k] - 2.0 * band.sd[k],
                                    band.mean[k] + 2.0 * band.sd[k]};
            if (with_data) row.push_back(run.data[k]);
            t.rows.push_back(std::move(row));
        }
        panels.emplace(name, std::move(t));
    }
    return panels;
}

PanelSet emit_plot_data(const RunArtifact& artifact, std::string_view figure)
{
    const FigureSpec spec = figure_spec(figure);
    if (spec.kind != FigureKind::Run) throw ConfigError("figure: " + spec.id + " is not drawn from a single run");
    std::vector<std::string> names;
    for (const std::string& c : spec.components) {
        if (c == component::incidence && !reads_incidence(artifact.config.obs_case)) continue;
        names.push_back(c);
    }
    PanelSet out;
    for (auto& [name, table] : run_panels(artifact, names)) {
        out.emplace(case_tag(artifact.config.obs_case) + "_" + name, std::move(table));
    }
    return out;
}

PanelSet emit_plot_data(const SweepResult& sweep, std::string_view figure)
{
    const FigureSpec spec = figure_spec(figure);
    if (spec.kind != FigureKind::Sweep) throw ConfigError("figure: " + spec.id + " is not drawn from a sweep");
    PanelSet out;
    for (const ObservationCase c : spec.cases) {
        CsvTable t;
        t.header = spec.id == "fig9" ? std::vector<std::string>{"sigma_d", "mse_s", "mse_i"}
                                     : std::vector<std::string>{"sigma_d", "gamma"};
        for (const double v : sweep.options.sigma_d) {
            const SweepCell& cell = sweep.cell(c, v);
            if (spec.id == "fig9") t.rows.push_back({v, cell.mean_mse_s, cell.mean_mse_i});
            else t.rows.push_back({v, cell.mean_gamma});
        }
        out.emplace(case_tag(c) + (spec.id == "fig9" ? "_mse" : "_gamma"), std::move(t));
    }
    return out;
}

PanelSet emit_plot_data(const SyntheticDataset& data, std::string_view figure)
{
    const FigureSpec spec = figure_spec(figure);
    if (spec.kind != FigureKind::Dataset) throw ConfigError("figure: " + spec.id + " is not drawn from a dataset");
    CsvTable s{{"time", "truth"}, {}}, i{{"time", "truth"}, {}}, cases{{"time", "truth", "data"}, {}};
    for (const TruthSample& x : data.truth_states) {
        s.rows.push_back({x.t, x.s});
        i.rows.push_back({x.t, x.i});
    }
    for (std::size_t k = 0; k < data.size(); ++k) {
        cases.rows.push_back({data.times[k], data.truth_monthly_cases[k], data.observations[k]});
    }
    return {{"S", std::move(s)}, {"I", std::move(i)}, {"cases", std::move(cases)}};
}

PanelSet generate_figure(std::string_view figure, const ScenarioConfig& base, std::size_t replicates,
                         unsigned workers)
{
    const FigureSpec spec = figure_spec(figure);
    switch (spec.kind) {
    case FigureKind::Dataset:
        return emit_plot_data(resolve_dataset(base), figure);
    case FigureKind::NoiseModels: {
        if (base.dataset_path) throw ConfigError("dataset.path: " + spec.id + " regenerates its data");
        PanelSet out;
        for (const double sigma : {0.01, 0.1, 0.25}) {
            DatasetSpec ds = base.dataset;
            ds.noise = MultiplicativeNoise{sigma};
            const SyntheticDataset data = generate_dataset(ds);
            CsvTable t{{"time", "truth", "data"}, {}};
            for (std::size_t k = 0; k < data.size(); ++k) {
                t.rows.push_back({data.times[k], data.params.rho * data.truth_monthly_cases[k], data.observations[k]});
            }
            out.emplace("sigma_" + format_short(sigma), std::move(t));
        }
        return out;
    }
    case FigureKind::Run: {
        ScenarioConfig config = base;
        config.mode = spec.mode;
        config.sigma_d = spec.sigma_d;
        config.replicates = 1;
        PanelSet out;
        for (const RunArtifact& a : compare_cases(config, spec.cases, workers)) out.merge(emit_plot_data(a, figure));
        return out;
    }
    case FigureKind::Sweep: {
        ScenarioConfig config = base;
        config.mode = spec.mode;
        SweepOptions options;
        options.cases = spec.cases;
        options.mse_replicates = replicates;
        options.gamma_replicates = std::min<std::size_t>(replicates, 5);
        return emit_plot_data(sweep_sigma_d(config, options, workers), figure);
    }
    }
    throw ConfigError("figure: unhandled kind");
}

void write_svg(const CsvTable& table, const std::string& title, std::ostream& out)
{
    constexpr double width = 720, height = 400, left = 70, right = 20, top = 40, bottom = 40;
    static const char* colors[] = {"#222222", "#1f77b4", "#9ecae1", "#9ecae1", "#d62728", "#2ca02c"};

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& row : table.rows) {
        x0 = std::min(x0, row[0]);
        x1 = std::max(x1, row[0]);
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (!std::isfinite(row[k])) continue;
            y0 = std::min(y0, row[k]);
            y1 = std::max(y1, row[k]);
        }
    }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n"
        << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
        << height - top - bottom << "\" fill=\"none\" stroke=\"#888\"/>\n";
    const auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        out << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\""
            << anchor << "\">" << text << "</text>\n";
    };
    label(left, height - bottom + 16, format_number(x0), "start");
    label(width - right, height - bottom + 16, format_number(x1), "end");
    label(left - 6, height - bottom, format_number(y0), "end");
    label(left - 6, top + 10, format_number(y1), "end");

    for (std::size_t k = 1; k < table.header.size(); ++k) {
        const char* color = colors[(k - 1) % std::size(colors)];
        const bool markers = table.header[k] == "data";
        if (markers) {
            for (const auto& row : table.rows) {
                out << "<circle cx=\"" << px(row[0]) << "\" cy=\"" << py(row[k]) << "\" r=\"1.8\" fill=\"" << color
                    << "\"/>\n";
            }
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
            for (const auto& row : table.rows) {
                if (std::isfinite(row[k])) out << px(row[0]) << ',' << py(row[k]) << ' ';
            }
            out << "\"/>\n";
        }
        label(width - right - 4, top + 14.0 * static_cast<double>(k), table.header[k], "end");
    }
    out << "</svg>\n";
}

}  // namespace epiassim
