#include "edrlab/meter_function.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "edrlab/errors.hpp"

namespace edrlab {

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& whole) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "bad number '" + item + "' in meter function '" + whole + "'");
    }
  }
  return out;
}

}  // namespace

MeterFunction MeterFunction::polynomial(std::vector<double> coefficients) {
  return MeterFunction(Polynomial{std::move(coefficients)});
}

MeterFunction MeterFunction::tabulated(std::vector<double> values, std::vector<double> images) {
  if (values.size() != images.size()) {
    throw Error(ErrorCode::kConfig, "tabulated meter function needs one image per value");
  }
  return MeterFunction(Tabulated{std::move(values), std::move(images)});
}

MeterFunction MeterFunction::parse(const std::string& text) {
  if (text == "identity") return identity();
  if (text.rfind("affine:", 0) == 0) {
    const auto nums = parse_numbers(text.substr(7), text);
    if (nums.size() != 2) throw Error(ErrorCode::kConfig, "affine:a,b expects two numbers");
    return affine(nums[0], nums[1]);
  }
  if (text.rfind("poly:", 0) == 0) {
    auto nums = parse_numbers(text.substr(5), text);
    if (nums.empty()) throw Error(ErrorCode::kConfig, "poly: expects coefficients");
    return polynomial(std::move(nums));
  }
  throw Error(ErrorCode::kConfig, "unknown meter function '" + text + "'");
}

bool MeterFunction::is_identity() const {
  const auto* a = std::get_if<Affine>(&form_);
  return a && a->slope == 1.0 && a->offset == 0.0;
}

std::optional<double> MeterFunction::evaluate(double m, double match_tol) const {
  if (const auto* t = std::get_if<Tabulated>(&form_)) {
    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t->values.size(); ++i) {
      const double d = std::abs(t->values[i] - m);
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    if (!best || best_dist > match_tol) return std::nullopt;
    return t->images[*best];
  }
  if (const auto* a = std::get_if<Affine>(&form_)) return a->slope * m + a->offset;
  const auto& p = std::get<Polynomial>(form_);
  double acc = 0.0;
  for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) acc = acc * m + *it;
  return acc;
}

MeterFunction MeterFunction::tabulate(std::span<const double> cluster_values, double match_tol) const {
  std::vector<double> values(cluster_values.begin(), cluster_values.end());
  std::vector<double> images;
  images.reserve(values.size());
  for (double v : values) {
    const auto image = evaluate(v, match_tol);
    if (!image) {
      std::ostringstream os;
      os << "meter function " << describe() << " undefined at " << v;
      throw Error(ErrorCode::kUndefinedFunction, os.str());
    }
    images.push_back(*image);
  }
  return tabulated(std::move(values), std::move(images));
}

std::string MeterFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* t = std::get_if<Tabulated>(&form_)) {
    os << "tabulated[" << t->values.size() << "]";
  } else if (const auto* a = std::get_if<Affine>(&form_)) {
    if (is_identity()) {
      os << "identity";
    } else {
      os << "affine:" << a->slope << "," << a->offset;
    }
  } else {
    os << "poly:";
    const auto& c = std::get<Polynomial>(form_).coefficients;
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  }
  return os.str();
}

}  // namespace edrlab
