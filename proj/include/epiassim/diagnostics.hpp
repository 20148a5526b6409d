#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace epiassim {

/// Innovation statistics of one analysis step.
struct InnovationRecord {
    double nu = 0.0;      ///< (1/N) sum (y_n - yhat_n)^2
    double phi_yy = 0.0;  ///< forecast variance of the observation predictions
    double d_obs = 0.0;   ///< observation variance used at this step
};

/// (1/M) sum (truth_i - estimate_i)^2. Throws LengthMismatch, DomainError on empty input.
double mse(std::span<const double> truth, std::span<const double> estimate);

/// |estimate - truth| / |truth|; DomainError when truth is zero.
double relative_error(double true_value, double estimate);

/// Innovations below this are treated as degenerate and left out of gamma.
inline constexpr double degenerate_innovation = 1e-12;

struct ConsistencyReport {
    double gamma = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;  ///< steps with nu < degenerate_innovation
};

/// gamma = mean over steps of (d_obs + phi_yy) / nu. Throws DegenerateInnovation
/// when every step is degenerate, DomainError on empty input.
ConsistencyReport consistency_gamma(std::span<const InnovationRecord> records);

}  // namespace epiassim
