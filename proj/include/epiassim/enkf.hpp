#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epiassim/random.hpp"

namespace epiassim {

enum class ComponentKind { State, Parameter };

struct Component {
    std::string name;
    ComponentKind kind = ComponentKind::State;

    bool operator==(const Component&) const = default;
};

/// N joint samples over a labelled component layout.
///
/// Members are stored column-wise (dim x N). The layout lists all state
/// components first, then all parameter components; names are unique.
class Ensemble {
public:
    Ensemble(std::vector<Component> layout, Eigen::MatrixXd members);
    Ensemble(std::vector<Component> layout, std::size_t size);

    std::size_t size() const { return static_cast<std::size_t>(members_.cols()); }
    std::size_t dim() const { return static_cast<std::size_t>(members_.rows()); }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t parameter_dim() const { return dim() - state_dim_; }

    const std::vector<Component>& layout() const { return layout_; }
    /// Index of the named component; throws DomainError if absent.
    std::size_t index_of(const std::string& name) const;
    bool contains(const std::string& name) const;

    const Eigen::MatrixXd& members() const { return members_; }
    Eigen::MatrixXd& members() { return members_; }
    Eigen::MatrixXd::ColXpr member(std::size_t n) { return members_.col(static_cast<Eigen::Index>(n)); }
    Eigen::MatrixXd::ConstColXpr member(std::size_t n) const
    {
        return members_.col(static_cast<Eigen::Index>(n));
    }

    /// (1/N) sum z_n
    Eigen::VectorXd mean() const;
    /// 1/(N-1) sum (z_n - mean)(z_n - mean)^T
    Eigen::MatrixXd covariance() const;

private:
    void check();

    std::vector<Component> layout_;
    Eigen::MatrixXd members_;
    std::size_t state_dim_ = 0;
};

/// Advances one member in place over an observation interval. The member index
/// is passed so callers can keep per-member side information.
using MemberPropagator = std::function<void(std::size_t member, Eigen::Ref<Eigen::VectorXd> z)>;
/// Projects a member back into the model's domain (clamping); may be empty.
using MemberProjector = std::function<void(Eigen::Ref<Eigen::VectorXd> z)>;
/// Maps a (predicted) member to its scalar observation prediction.
using MemberObserver =
    std::function<double(std::size_t member, const Eigen::Ref<const Eigen::VectorXd>& z)>;

/// Forecast step: z_n <- F(z_n) + v_n, v_n ~ N(0, diag(process_variance)).
///
/// `process_variance` has one entry per component and must be zero on the
/// parameter block. Members are independent and may be advanced on `workers`
/// threads; member n draws from streams.for_member(n). A propagation failure is
/// rethrown as MemberFailure carrying the member index.
void enkf_predict(Ensemble& ensemble, const MemberPropagator& propagate,
                  const Eigen::VectorXd& process_variance, const MemberStreams& streams,
                  const MemberProjector& project = {}, unsigned workers = 1);

/// Random-walk drift on the parameter block: theta_n += xi_n, xi_n ~ N(0, diag(drift_variance)).
/// `drift_variance` has one entry per parameter component.
void parameter_drift(Ensemble& ensemble, const Eigen::VectorXd& drift_variance,
                     const MemberStreams& streams);

struct AnalysisRecord {
    double datum = 0.0;
    double d_obs = 0.0;
    double predicted_mean = 0.0;   ///< mean of the observation predictions
    double phi_yy = 0.0;           ///< 1/(N-1) variance of the observation predictions, floored at 0
    double nu = 0.0;               ///< (1/N) sum (y_n - yhat_n)^2
    Eigen::VectorXd gain;          ///< one entry per component
    Eigen::VectorXd predictions;   ///< yhat_n
    Eigen::VectorXd perturbed;     ///< y_n = y + w_n
};

/// Cross-covariance gain Phi^{z yhat} / (Phi^{yhat yhat} + D) for a scalar datum,
/// with both covariances normalised by 1/(N-1) and Phi^{yhat yhat} floored at 0.
Eigen::VectorXd ensemble_gain(const Eigen::MatrixXd& members, const Eigen::VectorXd& predictions,
                              double d_obs);

/// Stochastic EnKF analysis with caller-provided perturbed observations y_n:
/// z_n += K (y_n - yhat_n), updating state and parameter blocks jointly.
AnalysisRecord enkf_analyze(Ensemble& ensemble, const MemberObserver& observe_member,
                            const Eigen::VectorXd& perturbed, double datum, double d_obs,
                            unsigned workers = 1);

/// As above, drawing y_n = y + w_n, w_n ~ N(0, D) from streams.for_member(n).
AnalysisRecord enkf_analyze(Ensemble& ensemble, const MemberObserver& observe_member, double datum,
                            double d_obs, const MemberStreams& streams, unsigned workers = 1);

}  // namespace epiassim
