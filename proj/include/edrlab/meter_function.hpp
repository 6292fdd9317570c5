#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace edrlab {

/// Real function of the meter reading. The tabulated form assigns one image
/// per eigenvalue cluster and is the most general function of a
/// finite-dimensional meter; the parametric forms are conveniences that
/// compile to it.
class MeterFunction {
 public:
  struct Tabulated {
    std::vector<double> values;
    std::vector<double> images;
  };
  /// f(m) = slope * m + offset
  struct Affine {
    double slope = 1.0;
    double offset = 0.0;
  };
  /// f(m) = sum_i coefficients[i] * m^i
  struct Polynomial {
    std::vector<double> coefficients;
  };
  using Form = std::variant<Tabulated, Affine, Polynomial>;

  static MeterFunction identity() { return MeterFunction(Affine{1.0, 0.0}); }
  static MeterFunction affine(double slope, double offset) {
    return MeterFunction(Affine{slope, offset});
  }
  static MeterFunction polynomial(std::vector<double> coefficients);
  /// Throws Error(kConfig) if the two lists differ in length.
  static MeterFunction tabulated(std::vector<double> values,
                                 std::vector<double> images);

  /// Parses "identity", "affine:a,b" or "poly:c0,c1,...".
  static MeterFunction parse(const std::string& text);

  const Form& form() const { return form_; }
  bool is_identity() const;

  /// Tabulated lookups match the nearest entry within match_tol.
  std::optional<double> evaluate(double m, double match_tol) const;

  /// Tabulated form on the given cluster values. Throws
  /// Error(kUndefinedFunction) if some value is not covered.
  MeterFunction tabulate(std::span<const double> cluster_values,
                         double match_tol) const;

  std::string describe() const;

 private:
  explicit MeterFunction(Form form) : form_(std::move(form)) {}

  Form form_;
};

}  // namespace edrlab
