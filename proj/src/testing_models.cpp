#include "epitest/testing_models.hpp"

#include "epitest/errors.hpp"

#include <cmath>
#include <string>

namespace epitest {

std::string_view to_string(TestingKind kind)
{
    switch (kind) {
    case TestingKind::adapted:
        return "adapted";
    case TestingKind::limiting:
        return "limiting";
    case TestingKind::up_saturating:
        return "up_saturating";
    case TestingKind::down_saturating:
        return "down_saturating";
    }
    return "unknown";
}

TestingKind parse_testing_kind(std::string_view text)
{
    if (text == "adapted")
        return TestingKind::adapted;
    if (text == "limiting")
        return TestingKind::limiting;
    if (text == "up" || text == "up_saturating")
        return TestingKind::up_saturating;
    if (text == "down" || text == "down_saturating")
        return TestingKind::down_saturating;
    throw ConfigError("unknown testing model '" + std::string(text) + "'");
}

bool is_saturating(TestingKind kind)
{
    return kind == TestingKind::up_saturating || kind == TestingKind::down_saturating;
}

TestingModel TestingModel::adapted(double kappa)
{
    return make(TestingKind::adapted, std::nullopt, kappa);
}

TestingModel TestingModel::limiting(double kappa)
{
    return make(TestingKind::limiting, std::nullopt, kappa);
}

TestingModel TestingModel::up_saturating(double alpha, double kappa)
{
    return make(TestingKind::up_saturating, alpha, kappa);
}

TestingModel TestingModel::down_saturating(double alpha, double kappa)
{
    return make(TestingKind::down_saturating, alpha, kappa);
}

TestingModel TestingModel::make(TestingKind kind, std::optional<double> alpha, double kappa)
{
    TestingModel model;
    model.kind = kind;
    model.kappa = kappa;
    model.alpha = alpha;
    model.validate();
    return model;
}

void TestingModel::validate() const
{
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw DomainError("testing model kappa must be positive");
    if (is_saturating(kind)) {
        if (!alpha && beta.empty())
            throw DomainError(std::string(to_string(kind)) + " model requires alpha");
        if (alpha && (!(*alpha > 0.0) || !std::isfinite(*alpha)))
            throw DomainError("testing model alpha must be positive");
    } else if (alpha || !beta.empty()) {
        throw DomainError(std::string(to_string(kind)) + " model takes no alpha");
    }
}

TestingModel TestingModel::with_covariates(std::span<const double> covariates) const
{
    if (beta.empty())
        return *this;
    TestingModel resolved = *this;
    resolved.alpha = alpha_from_covariates(beta, covariates);
    resolved.beta.clear();
    return resolved;
}

double eval_f(const TestingModel& model, double tests_per_person)
{
    if (!(tests_per_person >= 0.0))
        throw DomainError("test rate must be non-negative");
    const double t = tests_per_person;
    switch (model.kind) {
    case TestingKind::adapted:
        return model.kappa;
    case TestingKind::limiting:
        return model.kappa * t;
    case TestingKind::up_saturating:
        if (!model.alpha)
            throw DomainError("up_saturating model has no resolved alpha");
        return model.kappa * t / (t + *model.alpha);
    case TestingKind::down_saturating:
        if (!model.alpha)
            throw DomainError("down_saturating model has no resolved alpha");
        return model.kappa * (*model.alpha + t);
    }
    throw DomainError("unknown testing kind");
}

double estimate_prevalence(double cases, double tests_per_person, const TestingModel& model)
{
    if (!(cases >= 0.0))
        throw DomainError("case count must be non-negative");
    const double f = eval_f(model, tests_per_person);
    if (f <= 0.0)
        throw DomainError("testing function is zero; prevalence undefined");
    return cases / f;
}

DailySeries estimate_prevalence(const DailySeries& cases, const DailySeries& tests_per_person,
                                const TestingModel& model)
{
    std::vector<std::optional<double>> out(cases.size());
    const bool needs_tests = model.kind != TestingKind::adapted;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!cases[i])
            continue;
        double rate = 0.0;
        if (needs_tests) {
            const auto t = tests_per_person.at(cases.start() + static_cast<std::int32_t>(i));
            if (!t)
                continue;
            rate = *t;
        }
        const double f = eval_f(model, rate);
        if (f > 0.0)
            out[i] = *cases[i] / f;
    }
    return DailySeries(cases.start(), std::move(out), false);
}

double alpha_from_covariates(std::span<const double> beta, std::span<const double> covariates)
{
    if (beta.size() != covariates.size() + 1)
        throw DomainError("beta must have one more entry than the covariate vector");
    double alpha = beta[0];
    for (std::size_t i = 0; i < covariates.size(); ++i)
        alpha += beta[i + 1] * covariates[i];
    if (!(alpha > 0.0))
        throw DomainError("covariates yield a non-positive alpha");
    return alpha;
}

LinearityRange linearity_range(const TestingModel& up_model, const TestingModel& down_model)
{
    if (up_model.kind != TestingKind::up_saturating || down_model.kind != TestingKind::down_saturating)
        throw DomainError("linearity_range needs an up_saturating and a down_saturating model");
    if (!up_model.alpha || !down_model.alpha)
        throw DomainError("linearity_range needs resolved alphas");
    return LinearityRange{*down_model.alpha, *up_model.alpha};
}

} // namespace epitest
