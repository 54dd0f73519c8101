#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mongeampere {

enum class Errc {
  invalid_constraint,
  invalid_polygon,
  outside_domain,
  unbounded_cell,
  infeasible_mass,
  incompatible_inputs,
  unsupported_input,
  singular_transform,
  not_positive_definite,
  unsupported_dimension,
  integration_failure,
  singular_point,
  invalid_sample,
  invalid_input,
};

std::string_view to_string(Errc code) noexcept;

// All library failures are reported through this type; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_constraint: return "invalid-constraint";
    case Errc::invalid_polygon: return "invalid-polygon";
    case Errc::outside_domain: return "outside-domain";
    case Errc::unbounded_cell: return "unbounded-cell";
    case Errc::infeasible_mass: return "infeasible-mass";
    case Errc::incompatible_inputs: return "incompatible-inputs";
    case Errc::unsupported_input: return "unsupported-input";
    case Errc::singular_transform: return "singular-transform";
    case Errc::not_positive_definite: return "not-positive-definite";
    case Errc::unsupported_dimension: return "unsupported-dimension";
    case Errc::integration_failure: return "integration-failure";
    case Errc::singular_point: return "singular-point";
    case Errc::invalid_sample: return "invalid-sample";
    case Errc::invalid_input: return "invalid-input";
  }
  return "unknown";
}

}  // namespace mongeampere
