#include "epiassim/sir_filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epiassim/errors.hpp"

namespace epiassim {

std::string_view mode_name(FilterMode mode)
{
    switch (mode) {
    case FilterMode::State: return "state";
    case FilterMode::ConstantParams: return "constant_params";
    case FilterMode::Tracking: return "tracking";
    }
    throw DomainError("unknown filter mode");
}

FilterMode parse_filter_mode(std::string_view text)
{
    for (const FilterMode m : {FilterMode::State, FilterMode::ConstantParams, FilterMode::Tracking}) {
        if (text == mode_name(m)) return m;
    }
    throw DomainError("unknown filter mode '" + std::string(text) + "'");
}

bool FilterResult::has(const std::string& name) const
{
    return std::any_of(layout.begin(), layout.end(), [&](const Component& c) { return c.name == name; });
}

namespace {

Eigen::Index component_index(const std::vector<Component>& layout, const std::string& name)
{
    for (std::size_t k = 0; k < layout.size(); ++k) {
        if (layout[k].name == name) return static_cast<Eigen::Index>(k);
    }
    throw MissingSeries(name);
}

std::vector<std::string> estimated_parameters(const FilterOptions& options)
{
    const std::vector<std::string> allowed =
        options.mode == FilterMode::ConstantParams ? std::vector<std::string>{component::b0, component::b1}
        : options.mode == FilterMode::Tracking     ? std::vector<std::string>{component::beta}
                                                   : std::vector<std::string>{};
    if (!options.estimated) return allowed;
    for (const std::string& name : *options.estimated) {
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
            throw ConfigError("estimated: parameter '" + name + "' is not available in " +
                              std::string(mode_name(options.mode)) + " mode");
        }
    }
    return *options.estimated;
}

void check_interval(const Interval& box, const char* field)
{
    if (!(box.lo <= box.hi) || !std::isfinite(box.lo) || !std::isfinite(box.hi)) {
        throw ConfigError(std::string("priors.") + field + ": lower bound exceeds upper bound");
    }
}

}  // namespace

std::vector<double> FilterResult::mean_series(const std::string& name) const
{
    const Eigen::Index k = component_index(layout, name);
    std::vector<double> out;
    out.reserve(steps.size());
    for (const StepRecord& s : steps) out.push_back(s.mean[k]);
    return out;
}

std::vector<double> FilterResult::sd_series(const std::string& name) const
{
    const Eigen::Index k = component_index(layout, name);
    std::vector<double> out;
    out.reserve(steps.size());
    for (const StepRecord& s : steps) out.push_back(std::sqrt(std::max(0.0, s.covariance(k, k))));
    return out;
}

std::vector<double> FilterResult::obs_estimate_series() const
{
    std::vector<double> out;
    out.reserve(steps.size());
    for (const StepRecord& s : steps) out.push_back(s.obs_estimate_mean);
    return out;
}

std::vector<InnovationRecord> FilterResult::innovations() const
{
    std::vector<InnovationRecord> out;
    out.reserve(steps.size());
    for (const StepRecord& s : steps) out.push_back(s.innovation);
    return out;
}

FilterResult run_filter(const SyntheticDataset& data, const ModelParams& known,
                        const FilterOptions& options)
{
    known.validate();
    if (data.size() == 0) throw ConfigError("dataset: no observations");
    if (options.n_ensemble < 2) throw ConfigError("n_ensemble: at least two members are required");
    if (!(options.noise.c_state >= 0)) throw ConfigError("noise.c_state: must be >= 0");
    if (!(options.noise.d_obs > 0)) throw ConfigError("noise.d_obs: must be > 0");
    if (!(options.noise.e_drift >= 0)) throw ConfigError("noise.e_drift: must be >= 0");
    check_interval(options.priors.s_factor, "s_factor");
    check_interval(options.priors.i_factor, "i_factor");
    check_interval(options.priors.b0, "b0");
    check_interval(options.priors.b1, "b1");
    check_interval(options.priors.beta, "beta");

    const std::vector<std::string> params = estimated_parameters(options);
    std::vector<Component> layout{{component::susceptible, ComponentKind::State},
                                  {component::infectious, ComponentKind::State},
                                  {component::incidence, ComponentKind::State}};
    for (const std::string& p : params) layout.push_back({p, ComponentKind::Parameter});

    constexpr Eigen::Index is = 0, ii = 1, ic = 2;
    auto find = [&](const std::string& name) -> Eigen::Index {
        for (std::size_t k = 3; k < layout.size(); ++k) {
            if (layout[k].name == name) return static_cast<Eigen::Index>(k);
        }
        return -1;
    };
    const Eigen::Index ib0 = find(component::b0);
    const Eigen::Index ib1 = find(component::b1);
    const Eigen::Index ibeta = find(component::beta);
    const bool tracking = options.mode == FilterMode::Tracking;

    Ensemble ensemble(layout, options.n_ensemble);

    // Initial ensemble: states first, then parameters, from one stream per member.
    const EpidemicState truth0 = data.initial_state();
    const MemberStreams init{options.seed, 0, Purpose::InitialEnsemble};
    for (std::size_t n = 0; n < options.n_ensemble; ++n) {
        RandomStream rng = init.for_member(n);
        auto z = ensemble.member(n);
        z[is] = truth0.s * rng.uniform(options.priors.s_factor.lo, options.priors.s_factor.hi);
        z[ii] = truth0.i * rng.uniform(options.priors.i_factor.lo, options.priors.i_factor.hi);
        z[ic] = 0.0;
        for (std::size_t k = 3; k < layout.size(); ++k) {
            const std::string& name = layout[k].name;
            const Interval box = name == component::b0   ? options.priors.b0
                                 : name == component::b1 ? options.priors.b1
                                                         : options.priors.beta;
            z[static_cast<Eigen::Index>(k)] = rng.uniform(box.lo, box.hi);
        }
    }

    const MemberProjector project = [=](Eigen::Ref<Eigen::VectorXd> z) {
        z[is] = std::max(z[is], 0.0);
        z[ii] = std::max(z[ii], 0.0);
        if (ib0 >= 0) z[ib0] = std::max(z[ib0], 0.0);
        if (ib1 >= 0) z[ib1] = std::clamp(z[ib1], 0.0, std::nextafter(1.0, 0.0));
        if (ibeta >= 0) z[ibeta] = std::max(z[ibeta], 0.0);
    };

    Eigen::VectorXd process_variance = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
    process_variance[is] = options.noise.c_state;
    process_variance[ii] = options.noise.c_state;
    const Eigen::VectorXd drift_variance =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(params.size()), options.noise.e_drift);

    FilterResult result;
    result.layout = layout;
    result.mode = options.mode;
    result.obs_case = options.obs_case;
    result.seed = options.seed;
    result.n_ensemble = options.n_ensemble;
    result.initial_mean = ensemble.mean();
    result.initial_covariance = ensemble.covariance();
    result.steps.reserve(data.size());

    const ObservationCase obs_case = options.obs_case;
    const MemberObserver observe_member = [&](std::size_t, const Eigen::Ref<const Eigen::VectorXd>& z) {
        return observe(obs_case, EpidemicState{z[is], z[ii], z[ic], true}, known);
    };

    double t_prev = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
        const std::size_t step = j + 1;
        const double t_obs = data.times[j];
        try {
            if (tracking && !params.empty()) {
                parameter_drift(ensemble, drift_variance,
                                MemberStreams{options.seed, step, Purpose::ParameterDrift});
                for (std::size_t n = 0; n < ensemble.size(); ++n) project(ensemble.member(n));
            }

            const MemberPropagator propagate = [&](std::size_t, Eigen::Ref<Eigen::VectorXd> z) {
                project(z);
                const BetaSource beta =
                    ibeta >= 0 ? BetaSource{ConstantBeta{z[ibeta]}}
                               : BetaSource{SeasonalBeta{ib0 >= 0 ? z[ib0] : known.b0,
                                                         ib1 >= 0 ? z[ib1] : known.b1}};
                const EpidemicState start = reset_incidence(EpidemicState{z[is], z[ii], 0.0});
                const EpidemicState end = integrate(start, known, t_prev, t_obs, beta, options.tol);
                z[is] = end.s;
                z[ii] = end.i;
                z[ic] = end.c;
            };
            enkf_predict(ensemble, propagate, process_variance,
                         MemberStreams{options.seed, step, Purpose::ProcessNoise}, project,
                         options.workers);

            const AnalysisRecord analysis = enkf_analyze(
                ensemble, observe_member, data.observations[j], options.noise.d_obs,
                MemberStreams{options.seed, step, Purpose::ObservationPerturbation}, options.workers);

            StepRecord record;
            record.time = t_obs;
            record.datum = data.observations[j];
            record.mean = ensemble.mean();
            record.covariance = ensemble.covariance();
            record.forecast_obs_mean = analysis.predicted_mean;
            record.innovation = {analysis.nu, analysis.phi_yy, analysis.d_obs};

            Eigen::VectorXd posterior_obs(static_cast<Eigen::Index>(ensemble.size()));
            for (std::size_t n = 0; n < ensemble.size(); ++n) {
                posterior_obs[static_cast<Eigen::Index>(n)] = observe_member(n, ensemble.member(n));
            }
            record.obs_estimate_mean = posterior_obs.mean();
            record.obs_estimate_sd = std::sqrt(
                (posterior_obs.array() - record.obs_estimate_mean).square().sum() /
                static_cast<double>(ensemble.size() - 1));
            result.steps.push_back(std::move(record));
        } catch (const NumericalError& e) {
            throw StepFailure(step, e.what());
        }
        t_prev = t_obs;
    }
    return result;
}

}  // namespace epiassim
