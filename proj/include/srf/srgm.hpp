#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace srf {

/// Growth-curve families for cumulative defect discovery. The first four
/// are classical reliability models; Logistic and Gompertz are
/// general-purpose growth curves used as additional fitting candidates.
enum class ModelKind { GO, YDSS, ISS, GG, Logistic, Gompertz };

inline constexpr std::array<ModelKind, 6> kAllModelKinds = {
    ModelKind::GO,  ModelKind::YDSS,     ModelKind::ISS,
    ModelKind::GG,  ModelKind::Logistic, ModelKind::Gompertz};

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameter vector of one growth curve. `a` is the asymptotic total defect
/// count, `b` the detection-rate/shape parameter; `extra` holds r for ISS
/// and c for GG, Logistic and Gompertz (absent for GO and YDSS).
struct SrgmSpec {
    ModelKind kind = ModelKind::GO;
    double a = 0.0;
    double b = 0.0;
    std::optional<double> extra;
};

/// Number of free parameters of a kind (2 or 3).
int param_count(ModelKind kind);
bool has_extra(ModelKind kind);

/// Admissibility check. Uses the evaluation-time ranges: a > 0; b > 0 for
/// GO/YDSS/ISS/GG/Logistic (fitted values may exceed the unit sampling
/// bound); 0 < r <= 1 for ISS; c > 0 for GG/Logistic; 0 < b < 1 and
/// 0 < c < 1 for Gompertz. Throws DomainError on violation.
void validate_spec(const SrgmSpec& spec);

/// Expected cumulative defect count m(t) of the curve at time t >= 0.
/// Validates the spec and throws DomainError on out-of-range parameters.
double mean_value(const SrgmSpec& spec, double t);

/// Name of the extra parameter ("r" or "c"), empty for two-parameter kinds.
std::string extra_name(ModelKind kind);

/// mean_value without the admissibility check. May return non-finite values
/// for wild parameters; fitting code relies on that instead of exceptions.
double mean_value_unchecked(const SrgmSpec& spec, double t) noexcept;

void to_json(nlohmann::json& j, const SrgmSpec& spec);
void from_json(const nlohmann::json& j, SrgmSpec& spec);

}  // namespace srf
