#pragma once

#include "epitest/timeseries.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace epitest {

/// Daily onset-to-death probabilities, probs[t] for t = 0..horizon.
struct OnsetToDeathPMF {
    std::vector<double> probs;

    [[nodiscard]] std::size_t horizon() const { return probs.empty() ? 0 : probs.size() - 1; }
    [[nodiscard]] double total_mass() const;
    [[nodiscard]] double mean() const;
};

/// Recovery rate of the SIR reduction, 1/day in (0, 1].
class RecoveryRate {
public:
    /// Inverse of a 5.0 day mean generation interval.
    static constexpr double kDefault = 0.2;

    explicit RecoveryRate(double gamma = kDefault);
    [[nodiscard]] double value() const { return gamma_; }

private:
    double gamma_;
};

inline constexpr std::size_t kDefaultPmfHorizon = 120;

/// Equal-weight mixture Gamma(4.39, 1.16) + Gamma(8.46, 2.22) discretized to
/// P(X in [t - 0.5, t + 0.5)), with probs[0] = P(X < 0.5).
OnsetToDeathPMF build_onset_to_death_pmf(std::size_t horizon_days = kDefaultPmfHorizon);

/// Continuous mixture CDF behind build_onset_to_death_pmf().
double onset_to_death_cdf(double days);

struct IncidenceResult {
    DailySeries incidence;
    /// Days where I(t) - (1 - gamma) I(t-1) was negative and clamped to zero.
    std::vector<std::size_t> clamped;
};

/// i(t) = I(t) - (1 - gamma) I(t - 1), with i(start) = gamma * I(start).
IncidenceResult incidence_from_prevalence(const DailySeries& prevalence, RecoveryRate gamma = RecoveryRate{});

/// D(t) = sum_{s=0}^{min(t, L)} pmf[s] * incidence(t - s), up to the unknown ifr factor.
DailySeries predict_death_curve(const DailySeries& incidence, const OnsetToDeathPMF& pmf);

/// Same convolution on plain vectors.
std::vector<double> convolve_pmf(std::span<const double> incidence, const OnsetToDeathPMF& pmf);

} // namespace epitest
