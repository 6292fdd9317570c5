#include "edrlab/errors.hpp"

#include "edrlab/tolerances.hpp"

namespace edrlab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimMismatch:
      return "DIM_MISMATCH";
    case ErrorCode::kNonUnitary:
      return "NON_UNITARY";
    case ErrorCode::kNonHermitian:
      return "NON_HERMITIAN";
    case ErrorCode::kUnnormalized:
      return "UNNORMALIZED";
    case ErrorCode::kUndefinedFunction:
      return "UNDEFINED_FUNCTION";
    case ErrorCode::kParse:
      return "PARSE_ERROR";
    case ErrorCode::kConfig:
      return "CONFIG_ERROR";
    case ErrorCode::kNumericalInconsistency:
      return "NUMERICAL_INCONSISTENCY";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
      code_(code) {}

namespace {

template <typename F>
void for_each_entry(Tolerances& t, F&& f) {
  f("state_norm", t.state_norm);
  f("hermiticity_rel", t.hermiticity_rel);
  f("unitarity", t.unitarity);
  f("imaginary_rel", t.imaginary_rel);
  f("cluster_rel", t.cluster_rel);
  f("povm_positivity", t.povm_positivity);
  f("povm_completeness", t.povm_completeness);
  f("born", t.born);
  f("pinv_cutoff_rel", t.pinv_cutoff_rel);
  f("feasibility_rel", t.feasibility_rel);
  f("moment_radicand", t.moment_radicand);
  f("spectral_check", t.spectral_check);
  f("spectral_check_max_dim", t.spectral_check_max_dim);
}

}  // namespace

void Tolerances::set(const std::string& key, double value) {
  bool found = false;
  for_each_entry(*this, [&](const char* name, double& slot) {
    if (key == name) {
      slot = value;
      found = true;
    }
  });
  if (!found) throw Error(ErrorCode::kConfig, "unknown tolerance key '" + key + "'");
}

std::map<std::string, double> Tolerances::as_map() const {
  std::map<std::string, double> out;
  Tolerances copy = *this;
  for_each_entry(copy, [&](const char* name, double& slot) { out[name] = slot; });
  return out;
}

}  // namespace edrlab
