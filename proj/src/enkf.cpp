#include "epiassim/enkf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "epiassim/errors.hpp"
#include "epiassim/parallel.hpp"

namespace epiassim {

Ensemble::Ensemble(std::vector<Component> layout, Eigen::MatrixXd members)
    : layout_(std::move(layout)), members_(std::move(members))
{
    check();
}

Ensemble::Ensemble(std::vector<Component> layout, std::size_t size)
    : layout_(std::move(layout)),
      members_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(layout_.size()),
                                     static_cast<Eigen::Index>(size)))
{
    check();
}

void Ensemble::check()
{
    if (members_.cols() < 2) throw DomainError("ensemble: at least two members are required");
    if (static_cast<std::size_t>(members_.rows()) != layout_.size()) {
        throw DomainError("ensemble: member dimension does not match the layout");
    }
    std::set<std::string> names;
    bool in_parameters = false;
    std::size_t states = 0;
    for (const Component& c : layout_) {
        if (!names.insert(c.name).second) throw DomainError("ensemble: duplicate component " + c.name);
        if (c.kind == ComponentKind::Parameter) {
            in_parameters = true;
        } else if (in_parameters) {
            throw DomainError("ensemble: state component " + c.name + " follows the parameter block");
        } else {
            ++states;
        }
    }
    state_dim_ = states;
}

std::size_t Ensemble::index_of(const std::string& name) const
{
    for (std::size_t k = 0; k < layout_.size(); ++k) {
        if (layout_[k].name == name) return k;
    }
    throw DomainError("ensemble: no component named " + name);
}

bool Ensemble::contains(const std::string& name) const
{
    return std::any_of(layout_.begin(), layout_.end(),
                       [&](const Component& c) { return c.name == name; });
}

Eigen::VectorXd Ensemble::mean() const
{
    return members_.rowwise().sum() / static_cast<double>(size());
}

Eigen::MatrixXd Ensemble::covariance() const
{
    const Eigen::MatrixXd anomalies = members_.colwise() - mean();
    return anomalies * anomalies.transpose() / static_cast<double>(size() - 1);
}

void enkf_predict(Ensemble& ensemble, const MemberPropagator& propagate,
                  const Eigen::VectorXd& process_variance, const MemberStreams& streams,
                  const MemberProjector& project, unsigned workers)
{
    const Eigen::Index dim = static_cast<Eigen::Index>(ensemble.dim());
    if (process_variance.size() != dim) {
        throw DomainError("enkf_predict: process variance needs one entry per component");
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
        if (!(process_variance[k] >= 0)) throw DomainError("enkf_predict: negative process variance");
        if (static_cast<std::size_t>(k) >= ensemble.state_dim() && process_variance[k] != 0.0) {
            throw DomainError("enkf_predict: process noise on a parameter component");
        }
    }
    const Eigen::VectorXd sd = process_variance.cwiseSqrt();

    parallel_for(ensemble.size(), workers, [&](std::size_t n) {
        auto z = ensemble.member(n);
        try {
            propagate(n, z);
        } catch (const std::exception& e) {
            throw MemberFailure(n, e.what());
        }
        RandomStream rng = streams.for_member(n);
        for (Eigen::Index k = 0; k < dim; ++k) {
            if (sd[k] > 0.0) z[k] += rng.normal(0.0, sd[k]);
        }
        if (project) project(z);
    });
}

void parameter_drift(Ensemble& ensemble, const Eigen::VectorXd& drift_variance,
                     const MemberStreams& streams)
{
    const std::size_t offset = ensemble.state_dim();
    if (static_cast<std::size_t>(drift_variance.size()) != ensemble.parameter_dim()) {
        throw DomainError("parameter_drift: drift variance needs one entry per parameter");
    }
    if ((drift_variance.array() < 0.0).any()) throw DomainError("parameter_drift: negative variance");
    const Eigen::VectorXd sd = drift_variance.cwiseSqrt();
    for (std::size_t n = 0; n < ensemble.size(); ++n) {
        RandomStream rng = streams.for_member(n);
        auto z = ensemble.member(n);
        for (Eigen::Index k = 0; k < sd.size(); ++k) {
            if (sd[k] > 0.0) z[static_cast<Eigen::Index>(offset) + k] += rng.normal(0.0, sd[k]);
        }
    }
}

Eigen::VectorXd ensemble_gain(const Eigen::MatrixXd& members, const Eigen::VectorXd& predictions,
                              double d_obs)
{
    const double n = static_cast<double>(members.cols());
    const Eigen::VectorXd z_mean = members.rowwise().sum() / n;
    const double y_mean = predictions.sum() / n;
    const Eigen::MatrixXd z_anom = members.colwise() - z_mean;
    const Eigen::VectorXd y_anom = predictions.array() - y_mean;
    const Eigen::VectorXd phi_zy = z_anom * y_anom / (n - 1.0);
    const double phi_yy = std::max(0.0, y_anom.squaredNorm() / (n - 1.0));
    const double denom = phi_yy + d_obs;
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        throw SingularInnovation("enkf_analyze: innovation variance is not positive");
    }
    return phi_zy / denom;
}

AnalysisRecord enkf_analyze(Ensemble& ensemble, const MemberObserver& observe_member,
                            const Eigen::VectorXd& perturbed, double datum, double d_obs,
                            unsigned workers)
{
    const std::size_t size = ensemble.size();
    if (static_cast<std::size_t>(perturbed.size()) != size) {
        throw DomainError("enkf_analyze: one perturbed observation per member is required");
    }
    if (!(d_obs > 0.0)) throw DomainError("enkf_analyze: observation variance must be positive");

    AnalysisRecord record;
    record.datum = datum;
    record.d_obs = d_obs;
    record.perturbed = perturbed;
    record.predictions.resize(static_cast<Eigen::Index>(size));
    parallel_for(size, workers, [&](std::size_t n) {
        record.predictions[static_cast<Eigen::Index>(n)] = observe_member(n, ensemble.member(n));
    });
    if (!record.predictions.allFinite()) {
        throw SingularInnovation("enkf_analyze: non-finite observation prediction");
    }

    const double count = static_cast<double>(size);
    record.predicted_mean = record.predictions.sum() / count;
    record.phi_yy = std::max(
        0.0, (record.predictions.array() - record.predicted_mean).square().sum() / (count - 1.0));
    record.gain = ensemble_gain(ensemble.members(), record.predictions, d_obs);

    const Eigen::VectorXd innovations = record.perturbed - record.predictions;
    record.nu = innovations.squaredNorm() / count;
    ensemble.members() += record.gain * innovations.transpose();
    return record;
}

AnalysisRecord enkf_analyze(Ensemble& ensemble, const MemberObserver& observe_member, double datum,
                            double d_obs, const MemberStreams& streams, unsigned workers)
{
    if (!(d_obs > 0.0)) throw DomainError("enkf_analyze: observation variance must be positive");
    const double sd = std::sqrt(d_obs);
    Eigen::VectorXd perturbed(static_cast<Eigen::Index>(ensemble.size()));
    for (std::size_t n = 0; n < ensemble.size(); ++n) {
        RandomStream rng = streams.for_member(n);
        perturbed[static_cast<Eigen::Index>(n)] = datum + rng.normal(0.0, sd);
    }
    return enkf_analyze(ensemble, observe_member, perturbed, datum, d_obs, workers);
}

}  // namespace epiassim
