#include "srf/srgm.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace srf {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::GO: return "GO";
        case ModelKind::YDSS: return "YDSS";
        case ModelKind::ISS: return "ISS";
        case ModelKind::GG: return "GG";
        case ModelKind::Logistic: return "Logistic";
        case ModelKind::Gompertz: return "Gompertz";
    }
    return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
    for (ModelKind k : kAllModelKinds) {
        if (name == to_string(k)) return k;
    }
    throw DomainError("unknown model kind: " + std::string(name));
}

int param_count(ModelKind kind) { return has_extra(kind) ? 3 : 2; }

bool has_extra(ModelKind kind) {
    return kind != ModelKind::GO && kind != ModelKind::YDSS;
}

std::string extra_name(ModelKind kind) {
    if (!has_extra(kind)) return "";
    return kind == ModelKind::ISS ? "r" : "c";
}

namespace {

[[noreturn]] void fail(const SrgmSpec& spec, const char* what) {
    throw DomainError(std::string(to_string(spec.kind)) + ": " + what);
}

}  // namespace

void validate_spec(const SrgmSpec& spec) {
    if (!std::isfinite(spec.a) || spec.a <= 0.0) fail(spec, "a must be positive");
    if (!std::isfinite(spec.b)) fail(spec, "b must be finite");
    if (has_extra(spec.kind)) {
        if (!spec.extra.has_value()) fail(spec, "missing shape parameter");
        if (!std::isfinite(*spec.extra)) fail(spec, "shape parameter must be finite");
    } else if (spec.extra.has_value()) {
        fail(spec, "unexpected shape parameter");
    }
    switch (spec.kind) {
        case ModelKind::GO:
        case ModelKind::YDSS:
            if (spec.b <= 0.0) fail(spec, "b must be > 0");
            break;
        case ModelKind::ISS:
            if (spec.b <= 0.0) fail(spec, "b must be > 0");
            if (*spec.extra <= 0.0 || *spec.extra > 1.0) fail(spec, "r must be in (0, 1]");
            break;
        case ModelKind::GG:
        case ModelKind::Logistic:
            if (spec.b <= 0.0) fail(spec, "b must be > 0");
            if (*spec.extra <= 0.0) fail(spec, "c must be > 0");
            break;
        case ModelKind::Gompertz:
            if (spec.b <= 0.0 || spec.b >= 1.0) fail(spec, "b must be in (0, 1)");
            if (*spec.extra <= 0.0 || *spec.extra >= 1.0) fail(spec, "c must be in (0, 1)");
            break;
    }
}

double mean_value_unchecked(const SrgmSpec& spec, double t) noexcept {
    const double a = spec.a;
    const double b = spec.b;
    switch (spec.kind) {
        case ModelKind::GO:
            return a * (-std::expm1(-b * t));
        case ModelKind::YDSS:
            return a * (1.0 - (1.0 + b * t) * std::exp(-b * t));
        case ModelKind::ISS: {
            const double r = spec.extra.value_or(1.0);
            return a * (-std::expm1(-b * t)) / (1.0 + (1.0 - r) / r * std::exp(-b * t));
        }
        case ModelKind::GG:
            return a * std::pow(-std::expm1(-b * t), spec.extra.value_or(1.0));
        case ModelKind::Logistic:
            return a / (1.0 + spec.extra.value_or(1.0) * std::exp(-b * t));
        case ModelKind::Gompertz:
            // a * b^(c^t), written via exp/log to avoid pow(pow) rounding.
            return a * std::exp(std::pow(spec.extra.value_or(0.5), t) * std::log(b));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double mean_value(const SrgmSpec& spec, double t) {
    validate_spec(spec);
    if (!(t >= 0.0)) throw DomainError("t must be non-negative");
    return mean_value_unchecked(spec, t);
}

void to_json(nlohmann::json& j, const SrgmSpec& spec) {
    j = nlohmann::json{{"kind", to_string(spec.kind)}, {"a", spec.a}, {"b", spec.b}};
    if (spec.extra.has_value()) j[extra_name(spec.kind)] = *spec.extra;
}

void from_json(const nlohmann::json& j, SrgmSpec& spec) {
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    spec.a = j.at("a").get<double>();
    spec.b = j.at("b").get<double>();
    spec.extra.reset();
    const std::string name = extra_name(spec.kind);
    if (!name.empty()) {
        if (j.contains(name)) {
            spec.extra = j.at(name).get<double>();
        } else if (j.contains("extra")) {
            spec.extra = j.at("extra").get<double>();
        }
    }
}

}  // namespace srf
