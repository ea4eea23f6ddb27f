#include "epitest/mortality.hpp"

#include "epitest/errors.hpp"
#include "epitest/special_functions.hpp"

#include <algorithm>
#include <string>

namespace epitest {

namespace {

struct GammaComponent {
    double weight;
    double shape;
    double scale;
};

constexpr GammaComponent kOnsetToDeath[] = {
    {0.5, 4.39, 1.16},
    {0.5, 8.46, 2.22},
};

} // namespace

double OnsetToDeathPMF::total_mass() const
{
    double sum = 0.0;
    for (double p : probs)
        sum += p;
    return sum;
}

double OnsetToDeathPMF::mean() const
{
    double sum = 0.0;
    for (std::size_t t = 0; t < probs.size(); ++t)
        sum += static_cast<double>(t) * probs[t];
    return sum;
}

RecoveryRate::RecoveryRate(double gamma) : gamma_(gamma)
{
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw DomainError("recovery rate must lie in (0, 1]");
}

double onset_to_death_cdf(double days)
{
    double cdf = 0.0;
    for (const auto& c : kOnsetToDeath)
        cdf += c.weight * special::gamma_cdf(days, c.shape, c.scale);
    return cdf;
}

OnsetToDeathPMF build_onset_to_death_pmf(std::size_t horizon_days)
{
    if (horizon_days < 30)
        throw DomainError("onset-to-death horizon must be at least 30 days");
    OnsetToDeathPMF pmf;
    pmf.probs.resize(horizon_days + 1);
    double lower = 0.0;
    for (std::size_t t = 0; t <= horizon_days; ++t) {
        const double upper = onset_to_death_cdf(static_cast<double>(t) + 0.5);
        pmf.probs[t] = std::max(upper - lower, 0.0);
        lower = upper;
    }
    return pmf;
}

IncidenceResult incidence_from_prevalence(const DailySeries& prevalence, RecoveryRate gamma)
{
    const std::vector<double> prev = prevalence.dense();
    const double g = gamma.value();
    IncidenceResult result;
    std::vector<std::optional<double>> out(prev.size());
    for (std::size_t t = 0; t < prev.size(); ++t) {
        double value = t == 0 ? g * prev[0] : prev[t] - (1.0 - g) * prev[t - 1];
        if (value < 0.0) {
            result.clamped.push_back(t);
            value = 0.0;
        }
        out[t] = value;
    }
    result.incidence = DailySeries(prevalence.start(), std::move(out), false);
    return result;
}

std::vector<double> convolve_pmf(std::span<const double> incidence, const OnsetToDeathPMF& pmf)
{
    const std::size_t horizon = pmf.horizon();
    std::vector<double> out(incidence.size(), 0.0);
    for (std::size_t t = 0; t < incidence.size(); ++t) {
        const std::size_t smax = std::min(t, horizon);
        double sum = 0.0;
        for (std::size_t s = 0; s <= smax; ++s)
            sum += pmf.probs[s] * incidence[t - s];
        out[t] = sum;
    }
    return out;
}

DailySeries predict_death_curve(const DailySeries& incidence, const OnsetToDeathPMF& pmf)
{
    const std::vector<double> in = incidence.dense();
    const std::vector<double> deaths = convolve_pmf(in, pmf);
    return DailySeries::from_values(incidence.start(), deaths, false);
}

} // namespace epitest
