#include "epiassim/diagnostics.hpp"

#include <cmath>
#include <string>

#include "epiassim/errors.hpp"

namespace epiassim {

double mse(std::span<const double> truth, std::span<const double> estimate)
{
    if (truth.size() != estimate.size()) {
        throw LengthMismatch("mse: truth has " + std::to_string(truth.size()) +
                             " points, estimate has " + std::to_string(estimate.size()));
    }
    if (truth.empty()) throw DomainError("mse: empty series");
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double d = truth[k] - estimate[k];
        sum += d * d;
    }
    return sum / static_cast<double>(truth.size());
}

double relative_error(double true_value, double estimate)
{
    if (true_value == 0.0) throw DomainError("relative_error: true value is zero");
    return std::abs(estimate - true_value) / std::abs(true_value);
}

ConsistencyReport consistency_gamma(std::span<const InnovationRecord> records)
{
    if (records.empty()) throw DomainError("consistency_gamma: no innovation records");
    ConsistencyReport report;
    double sum = 0.0;
    for (const InnovationRecord& r : records) {
        if (!(r.nu >= degenerate_innovation)) {
            ++report.excluded;
            continue;
        }
        sum += (r.d_obs + r.phi_yy) / r.nu;
        ++report.used;
    }
    if (report.used == 0) throw DegenerateInnovation("consistency_gamma: every innovation is degenerate");
    report.gamma = sum / static_cast<double>(report.used);
    return report;
}

}  // namespace epiassim
