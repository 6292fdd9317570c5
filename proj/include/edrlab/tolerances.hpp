#pragma once

#include <map>
#include <string>

namespace edrlab {

/// Numerical thresholds shared by every module. Relative entries are scaled
/// by a norm or a spectral diameter at the point of use.
struct Tolerances {
  double state_norm = 1e-12;
  double hermiticity_rel = 1e-12;
  double unitarity = 1e-10;
  double imaginary_rel = 1e-12;
  double cluster_rel = 1e-8;
  double povm_positivity = 1e-10;
  double povm_completeness = 1e-10;
  double born = 1e-8;
  double pinv_cutoff_rel = 1e-12;
  double feasibility_rel = 1e-8;
  double moment_radicand = 1e-10;
  double spectral_check = 1e-9;
  double spectral_check_max_dim = 256;

  /// Overrides one entry by name (e.g. "cluster_rel"). Throws Error(kConfig)
  /// on unknown keys.
  void set(const std::string& key, double value);

  std::map<std::string, double> as_map() const;
};

}  // namespace edrlab
