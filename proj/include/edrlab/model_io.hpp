#pragma once

// Process file format (format_version 1). See docs/model-format.md.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "edrlab/process.hpp"

namespace edrlab {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json process_to_json(const MeasurementProcess& proc);
/// Throws Error with kParse, kDimMismatch, kNonUnitary, kNonHermitian or
/// kUnnormalized.
MeasurementProcess process_from_json(const nlohmann::json& doc,
                                     const Tolerances& tol = {});

void save_process(const MeasurementProcess& proc,
                  const std::filesystem::path& path);
MeasurementProcess load_custom(const std::filesystem::path& path,
                               const Tolerances& tol = {});

/// Little-endian float64 payload, interleaved (re, im), base64.
std::string encode_complex(const Complex* data, std::size_t count);
std::vector<Complex> decode_complex(const std::string& text);

nlohmann::json state_to_json(const QState& s);
QState state_from_json(const nlohmann::json& doc, const Tolerances& tol = {});

}  // namespace edrlab
