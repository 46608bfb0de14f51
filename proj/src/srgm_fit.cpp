#include "srf/srgm_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace srf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double x) { return std::log(x / (1.0 - x)); }

/// Van der Corput radical inverse; bases 2/3/5 give a Halton grid.
double radical_inverse(int base, int index) {
    double inv = 1.0 / base;
    double frac = inv;
    double result = 0.0;
    while (index > 0) {
        result += frac * (index % base);
        index /= base;
        frac *= inv;
    }
    return result;
}

SrgmSpec unpack(ModelKind kind, const Eigen::VectorXd& u) {
    SrgmSpec spec;
    spec.kind = kind;
    spec.a = std::exp(u[0]);
    switch (kind) {
        case ModelKind::GO:
        case ModelKind::YDSS:
            spec.b = std::exp(u[1]);
            break;
        case ModelKind::ISS:
            spec.b = std::exp(u[1]);
            spec.extra = sigmoid(u[2]);
            break;
        case ModelKind::GG:
        case ModelKind::Logistic:
            spec.b = std::exp(u[1]);
            spec.extra = std::exp(u[2]);
            break;
        case ModelKind::Gompertz:
            spec.b = sigmoid(u[1]);
            spec.extra = sigmoid(u[2]);
            break;
    }
    return spec;
}

/// Start-box corners in transformed coordinates, sized from the data scale.
/// The rate box upper end scales with the observed saturation time (first
/// time the counts reach 95% of their final value) so fast-saturating
/// series still get starts in the right decade. Starts only seed the
/// optimizer; the damped steps move freely beyond these boxes.
void start_box(ModelKind kind, double t_last, double t_sat, double y_scale, Eigen::VectorXd& lo,
               Eigen::VectorXd& hi) {
    const int dims = param_count(kind);
    lo.resize(dims);
    hi.resize(dims);
    lo[0] = std::log(1.02 * y_scale);
    hi[0] = std::log(24.0 * y_scale);
    if (kind == ModelKind::Gompertz) {
        lo[1] = logit(0.002);
        hi[1] = logit(0.6);
        lo[2] = logit(0.35);
        hi[2] = logit(0.97);
        return;
    }
    lo[1] = std::log(0.25 / t_last);
    hi[1] = std::log(6.0 / std::max(1.0, t_sat));
    switch (kind) {
        case ModelKind::ISS:
            lo[2] = logit(0.03);
            hi[2] = logit(0.97);
            break;
        case ModelKind::GG:
            lo[2] = std::log(0.25);
            hi[2] = std::log(3.0);
            break;
        case ModelKind::Logistic:
            lo[2] = std::log(0.5);
            hi[2] = std::log(400.0);
            break;
        default:
            break;
    }
}

struct StartOutcome {
    Eigen::VectorXd u;
    double ssr = kInf;
    bool finite = false;
};

class LmProblem {
public:
    LmProblem(ModelKind kind, const std::vector<double>& times, const std::vector<double>& counts)
        : kind_(kind), times_(times), counts_(counts) {}

    double ssr(const Eigen::VectorXd& u, Eigen::VectorXd* residuals = nullptr) const {
        const SrgmSpec spec = unpack(kind_, u);
        double total = 0.0;
        if (residuals) residuals->resize(static_cast<Eigen::Index>(times_.size()));
        for (std::size_t i = 0; i < times_.size(); ++i) {
            double r = mean_value_unchecked(spec, times_[i]) - counts_[i];
            if (!std::isfinite(r)) return kInf;
            if (residuals) (*residuals)[static_cast<Eigen::Index>(i)] = r;
            total += r * r;
        }
        return total;
    }

    /// Central-difference Jacobian in transformed coordinates. Returns false
    /// when a perturbed evaluation goes non-finite.
    bool jacobian(const Eigen::VectorXd& u, Eigen::MatrixXd& jac) const {
        const auto n = static_cast<Eigen::Index>(times_.size());
        const auto p = u.size();
        jac.resize(n, p);
        Eigen::VectorXd plus(n), minus(n), probe = u;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
            probe[j] = u[j] + h;
            if (!std::isfinite(ssr(probe, &plus))) return false;
            probe[j] = u[j] - h;
            if (!std::isfinite(ssr(probe, &minus))) return false;
            probe[j] = u[j];
            jac.col(j) = (plus - minus) / (2.0 * h);
        }
        return jac.allFinite();
    }

    StartOutcome run(Eigen::VectorXd u, const FitConfig& config) const {
        StartOutcome out;
        Eigen::VectorXd residuals;
        double ssr_cur = ssr(u, &residuals);
        if (!std::isfinite(ssr_cur)) return out;

        double lambda = 1e-3;
        Eigen::MatrixXd jac;
        for (int iter = 0; iter < config.max_iterations; ++iter) {
            if (!jacobian(u, jac)) break;
            const Eigen::MatrixXd normal = jac.transpose() * jac;
            const Eigen::VectorXd gradient = jac.transpose() * residuals;
            bool stepped = false;
            while (lambda <= 1e14) {
                Eigen::MatrixXd damped = normal;
                damped.diagonal() += lambda * (normal.diagonal().array() + 1e-12).matrix();
                const Eigen::VectorXd delta = damped.ldlt().solve(-gradient);
                if (!delta.allFinite()) {
                    lambda *= 4.0;
                    continue;
                }
                Eigen::VectorXd trial_res;
                const double ssr_trial = ssr(u + delta, &trial_res);
                if (std::isfinite(ssr_trial) && ssr_trial < ssr_cur) {
                    const double improvement = ssr_cur - ssr_trial;
                    u += delta;
                    residuals.swap(trial_res);
                    ssr_cur = ssr_trial;
                    lambda = std::max(lambda / 3.0, 1e-14);
                    stepped = true;
                    if (improvement <= config.rel_tolerance * ssr_cur) {
                        out.u = u;
                        out.ssr = ssr_cur;
                        out.finite = true;
                        return out;
                    }
                    break;
                }
                lambda *= 4.0;
            }
            if (!stepped) break;  // stalled at a local minimum
        }
        out.u = u;
        out.ssr = ssr_cur;
        out.finite = std::isfinite(ssr_cur);
        return out;
    }

private:
    ModelKind kind_;
    const std::vector<double>& times_;
    const std::vector<double>& counts_;
};

}  // namespace

FitResult fit(const DefectSeries& prefix, ModelKind kind, const FitConfig& config) {
    FitResult result;
    result.spec.kind = kind;
    const int p = param_count(kind);
    const auto n = prefix.size();
    if (static_cast<int>(n) < p + 1) return result;  // under-determined, recorded as Inf

    std::vector<double> times(n), counts(prefix.counts().begin(), prefix.counts().end());
    for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(prefix.times()[i]);
    const double t_last = std::max(1.0, times.back());
    const double y_max = *std::max_element(counts.begin(), counts.end());
    const double y_scale = std::max(y_max, 1e-6);
    double t_sat = t_last;
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] >= 0.95 * y_max) {
            t_sat = std::max(1.0, times[i]);
            break;
        }
    }

    Eigen::VectorXd lo, hi;
    start_box(kind, t_last, t_sat, y_scale, lo, hi);

    static constexpr int kBases[3] = {2, 3, 5};
    LmProblem problem(kind, times, counts);
    StartOutcome best;
    for (int s = 1; s <= config.starts; ++s) {
        Eigen::VectorXd u0(p);
        for (int j = 0; j < p; ++j) {
            u0[j] = lo[j] + radical_inverse(kBases[j], s) * (hi[j] - lo[j]);
        }
        StartOutcome outcome = problem.run(std::move(u0), config);
        if (outcome.finite && outcome.ssr < best.ssr) best = std::move(outcome);
    }
    if (!best.finite) return result;

    result.spec = unpack(kind, best.u);
    result.mse = best.ssr / static_cast<double>(n);
    result.converged = true;
    return result;
}

namespace {

/// Strictly-better-with-margin comparison; near-equal MSEs (exact fits from
/// nested model families both at the numerical floor) count as ties so the
/// fixed kind order decides.
bool clearly_better(double candidate, double incumbent) {
    if (!std::isfinite(incumbent)) return std::isfinite(candidate);
    return candidate < incumbent - (1e-9 * incumbent + 1e-12);
}

}  // namespace

std::pair<ModelKind, FitResult> select_best(const DefectSeries& prefix, const FitConfig& config) {
    std::pair<ModelKind, FitResult> best{ModelKind::GO, FitResult{}};
    bool any = false;
    for (ModelKind kind : kAllModelKinds) {
        FitResult result = fit(prefix, kind, config);
        if (!result.converged) continue;
        if (!any || clearly_better(result.mse, best.second.mse)) {
            best = {kind, std::move(result)};
            any = true;
        }
    }
    if (!any) {
        throw AllFitsFailed("series '" + prefix.id() + "': no model could be fitted");
    }
    return best;
}

void to_json(nlohmann::json& j, const FitResult& result) {
    j = nlohmann::json::object();
    j["converged"] = result.converged;
    if (result.converged) {
        j["spec"] = result.spec;
        j["mse"] = result.mse;
    } else {
        j["spec"] = nullptr;
        j["mse"] = "Inf";
    }
}

void from_json(const nlohmann::json& j, FitResult& result) {
    result.converged = j.at("converged").get<bool>();
    if (result.converged) {
        result.spec = j.at("spec").get<SrgmSpec>();
        result.mse = j.at("mse").get<double>();
    } else {
        result.spec = SrgmSpec{};
        result.mse = kInf;
    }
}

nlohmann::json fit_report(const DefectSeries& prefix, const FitConfig& config) {
    nlohmann::json fits = nlohmann::json::object();
    for (ModelKind kind : kAllModelKinds) {
        fits[to_string(kind)] = fit(prefix, kind, config);
    }
    nlohmann::json j;
    j["series"] = prefix.id();
    j["fits"] = std::move(fits);
    try {
        auto [kind, result] = select_best(prefix, config);
        j["best"] = to_string(kind);
        j["best_mse"] = result.mse;
    } catch (const AllFitsFailed&) {
        j["best"] = nullptr;
    }
    return j;
}

}  // namespace srf
