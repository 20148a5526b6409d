#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>

#include "epiassim/errors.hpp"
#include "epiassim/harness.hpp"
#include "epiassim/random.hpp"

namespace epiassim {

namespace {

using nlohmann::json;

std::string join_path(const std::string& parent, std::string_view key)
{
    return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

/// Typed access to one JSON object with field-path error messages.
class FieldReader {
public:
    FieldReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ConfigError(where() + "expected an object");
    }

    void allow(std::initializer_list<std::string_view> keys) const
    {
        for (const auto& [key, value] : j_.items()) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                throw ConfigError(join_path(path_, key) + ": unknown field");
            }
        }
    }

    bool has(std::string_view key) const { return j_.contains(std::string(key)); }
    const json& at(std::string_view key) const { return j_.at(std::string(key)); }
    std::string path(std::string_view key) const { return join_path(path_, key); }

    void number(std::string_view key, double& out) const
    {
        if (!has(key)) return;
        const json& v = at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw ConfigError(path(key) + ": expected a finite number");
        }
        out = v.get<double>();
    }

    template <typename Unsigned>
    void count(std::string_view key, Unsigned& out) const
    {
        if (!has(key)) return;
        const json& v = at(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
            throw ConfigError(path(key) + ": expected a non-negative integer");
        }
        out = static_cast<Unsigned>(v.get<std::uint64_t>());
    }

    void integer(std::string_view key, int& out) const
    {
        if (!has(key)) return;
        const json& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
        out = v.get<int>();
    }

    std::string text(std::string_view key) const
    {
        const json& v = at(key);
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        throw ConfigError(path(key) + ": expected a string");
    }

    void interval(std::string_view key, Interval& out) const
    {
        if (!has(key)) return;
        const json& v = at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError(path(key) + ": expected [lo, hi]");
        }
        out = {v[0].get<double>(), v[1].get<double>()};
    }

private:
    std::string where() const { return path_.empty() ? std::string() : path_ + ": "; }

    const json& j_;
    std::string path_;
};

void read_params(const FieldReader& r, ModelParams& p)
{
    r.allow({"n_pop", "b0", "b1", "lambda", "m", "rho"});
    r.number("n_pop", p.n_pop);
    r.number("b0", p.b0);
    r.number("b1", p.b1);
    r.number("lambda", p.lambda);
    r.number("m", p.m);
    r.number("rho", p.rho);
}

void read_noise(const FieldReader& r, NoiseModel& noise)
{
    r.allow({"kind", "sigma"});
    std::string kind = std::holds_alternative<AdditiveNoise>(noise) ? "additive" : "multiplicative";
    double sigma = std::visit([](const auto& n) {
        if constexpr (std::is_same_v<std::decay_t<decltype(n)>, AdditiveNoise>) return n.sigma;
        else return n.sigma_log;
    }, noise);
    if (r.has("kind")) kind = r.text("kind");
    r.number("sigma", sigma);
    if (kind == "additive") noise = AdditiveNoise{sigma};
    else if (kind == "multiplicative") noise = MultiplicativeNoise{sigma};
    else throw ConfigError(r.path("kind") + ": expected \"additive\" or \"multiplicative\"");
}

void read_dataset(const FieldReader& r, ScenarioConfig& c)
{
    r.allow({"path", "params", "gen_case", "noise", "horizon_years", "seed", "samples_per_month"});
    if (r.has("path")) {
        c.dataset_path = r.text("path");
    }
    if (r.has("params")) read_params(FieldReader(r.at("params"), r.path("params")), c.dataset.params);
    if (r.has("gen_case")) {
        try {
            c.dataset.gen_case = parse_observation_case(r.text("gen_case"));
        } catch (const DomainError& e) {
            throw ConfigError(r.path("gen_case") + ": " + e.what());
        }
    }
    if (r.has("noise")) read_noise(FieldReader(r.at("noise"), r.path("noise")), c.dataset.noise);
    r.integer("horizon_years", c.dataset.horizon_years);
    r.count("seed", c.dataset.seed);
    r.integer("samples_per_month", c.dataset.samples_per_month);
}

json interval_json(const Interval& box) { return json::array({box.lo, box.hi}); }

}  // namespace

void ScenarioConfig::validate() const
{
    if (!dataset_path) {
        try {
            dataset.params.validate();
        } catch (const DomainError& e) {
            throw ConfigError(std::string("dataset.params: ") + e.what());
        }
        try {
            epiassim::validate(dataset.noise);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("dataset.noise.sigma: ") + e.what());
        }
        if (dataset.horizon_years < 1) throw ConfigError("dataset.horizon_years: must be >= 1");
        if (dataset.samples_per_month < 1) throw ConfigError("dataset.samples_per_month: must be >= 1");
    }
    if (n_ensemble < 2) throw ConfigError("n_ensemble: must be >= 2");
    if (!(sigma_c >= 0)) throw ConfigError("sigma_c: must be >= 0");
    if (!(sigma_d > 0)) throw ConfigError("sigma_d: must be > 0");
    if (!(sigma_e >= 0)) throw ConfigError("sigma_e: must be >= 0");
    if (replicates < 1) throw ConfigError("replicates: must be >= 1");
    const std::pair<const char*, Interval> boxes[] = {{"s_factor", priors.s_factor},
                                                      {"i_factor", priors.i_factor},
                                                      {"b0", priors.b0},
                                                      {"b1", priors.b1},
                                                      {"beta", priors.beta}};
    for (const auto& [name, box] : boxes) {
        if (!(box.lo <= box.hi) || !std::isfinite(box.lo) || !std::isfinite(box.hi)) {
            throw ConfigError(std::string("priors.") + name + ": need finite lo <= hi");
        }
        if (box.lo < 0) throw ConfigError(std::string("priors.") + name + ": must be non-negative");
    }
}

ScenarioConfig scenario_from_json(const nlohmann::json& j, ScenarioConfig base)
{
    const FieldReader r(j, "");
    r.allow({"dataset", "mode", "case", "n_ensemble", "sigma_c", "sigma_d", "sigma_e", "priors", "seed",
             "replicates"});
    ScenarioConfig c = std::move(base);
    if (r.has("dataset")) read_dataset(FieldReader(r.at("dataset"), "dataset"), c);
    if (r.has("mode")) {
        try {
            c.mode = parse_filter_mode(r.text("mode"));
        } catch (const DomainError& e) {
            throw ConfigError(std::string("mode: ") + e.what());
        }
    }
    if (r.has("case")) {
        try {
            c.obs_case = parse_observation_case(r.text("case"));
        } catch (const DomainError& e) {
            throw ConfigError(std::string("case: ") + e.what());
        }
    }
    r.count("n_ensemble", c.n_ensemble);
    r.number("sigma_c", c.sigma_c);
    r.number("sigma_d", c.sigma_d);
    r.number("sigma_e", c.sigma_e);
    if (r.has("priors")) {
        const FieldReader p(r.at("priors"), "priors");
        p.allow({"s_factor", "i_factor", "b0", "b1", "beta"});
        p.interval("s_factor", c.priors.s_factor);
        p.interval("i_factor", c.priors.i_factor);
        p.interval("b0", c.priors.b0);
        p.interval("b1", c.priors.b1);
        p.interval("beta", c.priors.beta);
    }
    r.count("seed", c.seed);
    r.count("replicates", c.replicates);
    c.validate();
    return c;
}

nlohmann::json scenario_to_json(const ScenarioConfig& c)
{
    json dataset;
    if (c.dataset_path) {
        dataset = {{"path", c.dataset_path->string()}};
    } else {
        dataset = {{"params", c.dataset.params},
                   {"gen_case", std::string(case_name(c.dataset.gen_case))},
                   {"noise", c.dataset.noise},
                   {"horizon_years", c.dataset.horizon_years},
                   {"seed", c.dataset.seed},
                   {"samples_per_month", c.dataset.samples_per_month}};
    }
    return {{"dataset", dataset},
            {"mode", std::string(mode_name(c.mode))},
            {"case", std::string(case_name(c.obs_case))},
            {"n_ensemble", c.n_ensemble},
            {"sigma_c", c.sigma_c},
            {"sigma_d", c.sigma_d},
            {"sigma_e", c.sigma_e},
            {"priors",
             {{"s_factor", interval_json(c.priors.s_factor)},
              {"i_factor", interval_json(c.priors.i_factor)},
              {"b0", interval_json(c.priors.b0)},
              {"b1", interval_json(c.priors.b1)},
              {"beta", interval_json(c.priors.beta)}}},
            {"seed", c.seed},
            {"replicates", c.replicates}};
}

ScenarioConfig load_scenario(const std::filesystem::path& path, ScenarioConfig base)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j, std::move(base));
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const ScenarioConfig& config)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(scenario_to_json(config).dump())));
    return buf;
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t replicate)
{
    RandomStream rng = RandomStream::derive(base, {static_cast<std::uint64_t>(Purpose::Replicate), replicate});
    return rng();
}

SyntheticDataset resolve_dataset(const ScenarioConfig& config)
{
    config.validate();
    if (config.dataset_path) return read_dataset_json(*config.dataset_path);
    return generate_dataset(config.dataset);
}

FilterOptions filter_options(const ScenarioConfig& config, std::uint64_t seed, unsigned workers)
{
    FilterOptions o;
    o.mode = config.mode;
    o.obs_case = config.obs_case;
    o.n_ensemble = config.n_ensemble;
    o.noise = NoiseSpec::from_std(config.sigma_c, config.sigma_d, config.sigma_e);
    o.priors = config.priors;
    o.seed = seed;
    o.workers = workers;
    return o;
}

}  // namespace epiassim
