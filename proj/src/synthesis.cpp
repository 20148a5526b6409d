#include "epiassim/synthesis.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "epiassim/errors.hpp"

namespace epiassim {

namespace {
constexpr int months_per_year = 12;
}

std::size_t SyntheticDataset::samples_per_interval() const
{
    if (times.empty() || truth_states.size() < 2 || (truth_states.size() - 1) % times.size() != 0) {
        throw DomainError("dataset: dense truth does not align with the observation times");
    }
    return (truth_states.size() - 1) / times.size();
}

EpidemicState SyntheticDataset::initial_state() const
{
    if (truth_states.empty()) throw DomainError("dataset: no truth samples");
    return reset_incidence(EpidemicState{truth_states.front().s, truth_states.front().i, 0.0});
}

std::vector<double> SyntheticDataset::truth_s_at_observations() const
{
    const std::size_t stride = samples_per_interval();
    std::vector<double> out;
    out.reserve(size());
    for (std::size_t j = 1; j <= size(); ++j) out.push_back(truth_states[j * stride].s);
    return out;
}

std::vector<double> SyntheticDataset::truth_i_at_observations() const
{
    const std::size_t stride = samples_per_interval();
    std::vector<double> out;
    out.reserve(size());
    for (std::size_t j = 1; j <= size(); ++j) out.push_back(truth_states[j * stride].i);
    return out;
}

std::vector<double> SyntheticDataset::truth_beta_at_observations() const
{
    std::vector<double> out;
    out.reserve(size());
    for (const double t : times) out.push_back(transmission_rate(t, params.b0, params.b1));
    return out;
}

SyntheticDataset generate_dataset(const DatasetSpec& spec)
{
    spec.params.validate();
    return generate_dataset_from(burn_in(spec.params, spec.burn_in).state, spec);
}

SyntheticDataset generate_dataset_from(const EpidemicState& start, const DatasetSpec& spec)
{
    spec.params.validate();
    validate(spec.noise);
    if (spec.horizon_years < 1) throw DomainError("generate_dataset: horizon_years must be >= 1");
    if (spec.samples_per_month < 1) throw DomainError("generate_dataset: samples_per_month must be >= 1");
    if (!(start.s >= 0 && start.i >= 0)) throw DomainError("generate_dataset: negative start state");

    SyntheticDataset data;
    data.gen_case = spec.gen_case;
    data.noise = spec.noise;
    data.params = spec.params;
    data.seed = spec.seed;

    const std::size_t months = static_cast<std::size_t>(spec.horizon_years) * months_per_year;
    const std::size_t per_month = static_cast<std::size_t>(spec.samples_per_month);
    const double dense_step_denominator = static_cast<double>(months_per_year * per_month);
    const BetaSource beta = SeasonalBeta{spec.params.b0, spec.params.b1};

    EpidemicState state = start;
    data.truth_states.push_back({0.0, state.s, state.i});
    for (std::size_t j = 0; j < months; ++j) {
        state = reset_incidence(state);
        for (std::size_t k = 0; k < per_month; ++k) {
            const double ta = static_cast<double>(j * per_month + k) / dense_step_denominator;
            const double tb = static_cast<double>(j * per_month + k + 1) / dense_step_denominator;
            state = integrate(state, spec.params, ta, tb, beta, spec.tol);
            data.truth_states.push_back({tb, state.s, state.i});
        }
        const double t_obs = static_cast<double>(j + 1) / months_per_year;
        data.truth_states.back().t = t_obs;
        data.times.push_back(t_obs);
        data.truth_monthly_cases.push_back(state.c);

        RandomStream rng = RandomStream::derive(
            spec.seed, {static_cast<std::uint64_t>(Purpose::DataNoise), j});
        data.observations.push_back(
            corrupt(observe(spec.gen_case, state, spec.params), spec.noise, rng));
    }
    return data;
}

void to_json(nlohmann::json& j, const ModelParams& p)
{
    j = nlohmann::json{{"n_pop", p.n_pop}, {"b0", p.b0},         {"b1", p.b1},
                       {"lambda", p.lambda}, {"m", p.m}, {"rho", p.rho}};
}

void from_json(const nlohmann::json& j, ModelParams& p)
{
    ModelParams defaults;
    p.n_pop = j.value("n_pop", defaults.n_pop);
    p.b0 = j.value("b0", defaults.b0);
    p.b1 = j.value("b1", defaults.b1);
    p.lambda = j.value("lambda", defaults.lambda);
    p.m = j.value("m", defaults.m);
    p.rho = j.value("rho", defaults.rho);
}

void to_json(nlohmann::json& j, const NoiseModel& noise)
{
    if (const auto* add = std::get_if<AdditiveNoise>(&noise)) {
        j = nlohmann::json{{"kind", "additive"}, {"sigma", add->sigma}};
    } else {
        j = nlohmann::json{{"kind", "multiplicative"},
                           {"sigma", std::get<MultiplicativeNoise>(noise).sigma_log}};
    }
}

void from_json(const nlohmann::json& j, NoiseModel& noise)
{
    const std::string kind = j.value("kind", std::string("additive"));
    const double sigma = j.value("sigma", 0.1);
    if (kind == "additive") {
        noise = AdditiveNoise{sigma};
    } else if (kind == "multiplicative") {
        noise = MultiplicativeNoise{sigma};
    } else {
        throw ConfigError("noise.kind: expected 'additive' or 'multiplicative', got '" + kind + "'");
    }
}

void to_json(nlohmann::json& j, const SyntheticDataset& d)
{
    nlohmann::json truth = nlohmann::json::array();
    for (const TruthSample& s : d.truth_states) truth.push_back({{"t", s.t}, {"s", s.s}, {"i", s.i}});
    j = nlohmann::json{{"times", d.times},
                       {"observations", d.observations},
                       {"truth_states", std::move(truth)},
                       {"truth_monthly_cases", d.truth_monthly_cases},
                       {"gen_case", std::string(case_name(d.gen_case))},
                       {"noise", d.noise},
                       {"params", d.params},
                       {"seed", d.seed}};
}

void from_json(const nlohmann::json& j, SyntheticDataset& d)
{
    d.times = j.at("times").get<std::vector<double>>();
    d.observations = j.at("observations").get<std::vector<double>>();
    d.truth_states.clear();
    for (const auto& s : j.at("truth_states")) {
        d.truth_states.push_back({s.at("t").get<double>(), s.at("s").get<double>(), s.at("i").get<double>()});
    }
    d.truth_monthly_cases = j.at("truth_monthly_cases").get<std::vector<double>>();
    const auto& gen = j.at("gen_case");
    d.gen_case = parse_observation_case(gen.is_number() ? std::to_string(gen.get<int>())
                                                        : gen.get<std::string>());
    d.noise = j.at("noise").get<NoiseModel>();
    d.params = j.at("params").get<ModelParams>();
    d.seed = j.at("seed").get<std::uint64_t>();
    if (d.observations.size() != d.times.size() || d.truth_monthly_cases.size() != d.times.size()) {
        throw ConfigError("dataset: times, observations and truth_monthly_cases differ in length");
    }
    d.samples_per_interval();
}

void write_dataset_json(const SyntheticDataset& d, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("dataset: cannot write " + path.string());
    out << nlohmann::json(d).dump(1) << '\n';
}

SyntheticDataset read_dataset_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("dataset: cannot read " + path.string());
    try {
        return nlohmann::json::parse(in).get<SyntheticDataset>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("dataset: " + path.string() + ": " + e.what());
    }
}

void write_observations_csv(const SyntheticDataset& d, std::ostream& out)
{
    out << "time,observation\n" << std::setprecision(17);
    for (std::size_t j = 0; j < d.size(); ++j) out << d.times[j] << ',' << d.observations[j] << '\n';
}

}  // namespace epiassim
