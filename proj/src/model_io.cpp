#include "edrlab/model_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace edrlab {

namespace {

using nlohmann::json;

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::kParse, "base64 payload length is not a multiple of 4");
  std::vector<unsigned char> out(3 * text.size() / 4);
  const int written = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                      static_cast<int>(text.size()));
  if (written < 0) throw Error(ErrorCode::kParse, "malformed base64 payload");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(written) - padding);
  return out;
}

void put_f64(std::vector<unsigned char>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xffu));
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

const json& field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw Error(ErrorCode::kParse, std::string("missing field '") + name + "'");
  }
  return doc.at(name);
}

template <typename T>
T number(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_number()) throw Error(ErrorCode::kParse, std::string("field '") + name + "' is not a number");
  return v.get<T>();
}

std::vector<Index> shape_of(const json& doc) {
  const json& s = field(doc, "shape");
  if (!s.is_array()) throw Error(ErrorCode::kParse, "shape is not an array");
  std::vector<Index> out;
  for (const auto& d : s) {
    if (!d.is_number_integer() || d.get<long long>() <= 0) throw Error(ErrorCode::kParse, "bad shape entry");
    out.push_back(d.get<Index>());
  }
  return out;
}

std::vector<Complex> payload(const json& doc, std::size_t expected) {
  const json& d = field(doc, "data");
  if (!d.is_string()) throw Error(ErrorCode::kParse, "payload is not a string");
  auto values = decode_complex(d.get<std::string>());
  if (values.size() != expected) {
    std::ostringstream os;
    os << "payload holds " << values.size() << " complex entries, shape needs " << expected;
    throw Error(ErrorCode::kDimMismatch, os.str());
  }
  return values;
}

json matrix_to_json(const CMatrix& m) {
  std::vector<Complex> row_major;
  row_major.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) row_major.push_back(m(i, j));
  return json{{"shape", {m.rows(), m.cols()}}, {"data", encode_complex(row_major.data(), row_major.size())}};
}

CMatrix matrix_from_json(const json& doc, Index expected_dim, const char* what) {
  const auto shape = shape_of(doc);
  if (shape.size() != 2 || shape[0] != expected_dim || shape[1] != expected_dim) {
    std::ostringstream os;
    os << what << " shape does not match dimension " << expected_dim;
    throw Error(ErrorCode::kDimMismatch, os.str());
  }
  const auto values = payload(doc, static_cast<std::size_t>(shape[0] * shape[1]));
  CMatrix m(shape[0], shape[1]);
  for (Index i = 0; i < shape[0]; ++i)
    for (Index j = 0; j < shape[1]; ++j) m(i, j) = values[static_cast<std::size_t>(i * shape[1] + j)];
  return m;
}

json observable_to_json(const Observable& o) {
  json out = matrix_to_json(o.matrix());
  out["units"] = std::string(units_name(o.units()));
  return out;
}

Observable observable_from_json(const json& doc, Index dim, const char* what, const Tolerances& tol) {
  const json& u = field(doc, "units");
  if (!u.is_string()) throw Error(ErrorCode::kParse, "units is not a string");
  return Observable(matrix_from_json(doc, dim, what), parse_units(u.get<std::string>()), tol);
}

json unitary_to_json(const UnitaryOp& u) {
  return std::visit(
      [&](const auto& r) -> json {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, UnitaryOp::Dense>) {
          json out = matrix_to_json(r.matrix);
          out["form"] = "dense";
          return out;
        } else if constexpr (std::is_same_v<R, UnitaryOp::Controlled>) {
          std::vector<Complex> flat;
          for (const auto& b : r.blocks)
            for (Index i = 0; i < b.rows(); ++i)
              for (Index j = 0; j < b.cols(); ++j) flat.push_back(b(i, j));
          return json{{"form", "object_controlled"},
                      {"shape", {r.dims.object, r.dims.probe, r.dims.probe}},
                      {"data", encode_complex(flat.data(), flat.size())}};
        } else {
          return json{{"form", "permutation"}, {"image", r.image}};
        }
      },
      u.representation());
}

UnitaryOp unitary_from_json(const json& doc, CompositeDims dims, const Tolerances& tol) {
  const json& form = field(doc, "form");
  if (!form.is_string()) throw Error(ErrorCode::kParse, "interaction form is not a string");
  const auto name = form.get<std::string>();
  if (name == "dense") return UnitaryOp(matrix_from_json(doc, dims.total(), "interaction"), tol);
  if (name == "object_controlled") {
    const auto shape = shape_of(doc);
    if (shape.size() != 3 || shape[0] != dims.object || shape[1] != dims.probe || shape[2] != dims.probe) {
      throw Error(ErrorCode::kDimMismatch, "controlled interaction shape does not match dims");
    }
    const auto values = payload(doc, static_cast<std::size_t>(shape[0] * shape[1] * shape[2]));
    std::vector<CMatrix> blocks;
    std::size_t pos = 0;
    for (Index a = 0; a < shape[0]; ++a) {
      CMatrix b(shape[1], shape[2]);
      for (Index i = 0; i < shape[1]; ++i)
        for (Index j = 0; j < shape[2]; ++j) b(i, j) = values[pos++];
      blocks.push_back(std::move(b));
    }
    return UnitaryOp(dims, std::move(blocks), tol);
  }
  if (name == "permutation") {
    const json& image = field(doc, "image");
    if (!image.is_array()) throw Error(ErrorCode::kParse, "permutation image is not an array");
    std::vector<Index> table;
    for (const auto& v : image) {
      if (!v.is_number_integer()) throw Error(ErrorCode::kParse, "permutation entry is not an integer");
      table.push_back(v.get<Index>());
    }
    if (static_cast<Index>(table.size()) != dims.total()) {
      throw Error(ErrorCode::kDimMismatch, "permutation length does not match dims");
    }
    return UnitaryOp(std::move(table));
  }
  throw Error(ErrorCode::kParse, "unknown interaction form '" + name + "'");
}

}  // namespace

std::string encode_complex(const Complex* data, std::size_t count) {
  std::vector<unsigned char> bytes;
  bytes.reserve(16 * count);
  for (std::size_t i = 0; i < count; ++i) {
    put_f64(bytes, data[i].real());
    put_f64(bytes, data[i].imag());
  }
  return base64_encode(bytes);
}

std::vector<Complex> decode_complex(const std::string& text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 16 != 0) throw Error(ErrorCode::kParse, "payload is not a whole number of (re, im) float64 pairs");
  std::vector<Complex> out(bytes.size() / 16);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = Complex(get_f64(&bytes[16 * i]), get_f64(&bytes[16 * i + 8]));
  }
  return out;
}

json state_to_json(const QState& s) {
  return json{{"shape", {s.dim()}}, {"data", encode_complex(s.amplitudes().data(), static_cast<std::size_t>(s.dim()))}};
}

QState state_from_json(const json& doc, const Tolerances& tol) {
  const auto shape = shape_of(doc);
  if (shape.size() != 1) throw Error(ErrorCode::kDimMismatch, "state shape must be one-dimensional");
  const auto values = payload(doc, static_cast<std::size_t>(shape[0]));
  CVector v(shape[0]);
  for (Index i = 0; i < shape[0]; ++i) v[i] = values[static_cast<std::size_t>(i)];
  return QState(std::move(v), tol.state_norm);
}

json process_to_json(const MeasurementProcess& proc) {
  return json{{"format", "edrlab-process"},
              {"format_version", kModelFormatVersion},
              {"dims", {{"object", proc.dims().object}, {"probe", proc.dims().probe}}},
              {"hbar", proc.hbar()},
              {"probe_state", state_to_json(proc.probe_state())},
              {"interaction", unitary_to_json(proc.interaction())},
              {"meter", observable_to_json(proc.meter())},
              {"measured", observable_to_json(proc.measured())},
              {"disturbed", observable_to_json(proc.disturbed())}};
}

MeasurementProcess process_from_json(const json& doc, const Tolerances& tol) {
  const json& format = field(doc, "format");
  if (!format.is_string() || format.get<std::string>() != "edrlab-process") {
    throw Error(ErrorCode::kParse, "not an edrlab-process document");
  }
  const int version = number<int>(doc, "format_version");
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kParse, "unsupported format_version " + std::to_string(version));
  }
  const json& d = field(doc, "dims");
  const CompositeDims dims{number<Index>(d, "object"), number<Index>(d, "probe")};
  if (dims.object <= 0 || dims.probe <= 0) throw Error(ErrorCode::kDimMismatch, "dims must be positive");

  QState xi = state_from_json(field(doc, "probe_state"), tol);
  if (xi.dim() != dims.probe) throw Error(ErrorCode::kDimMismatch, "probe state does not match probe dimension");
  UnitaryOp u = unitary_from_json(field(doc, "interaction"), dims, tol);
  Observable meter = observable_from_json(field(doc, "meter"), dims.probe, "meter", tol);
  Observable measured = observable_from_json(field(doc, "measured"), dims.object, "measured", tol);
  Observable disturbed = observable_from_json(field(doc, "disturbed"), dims.object, "disturbed", tol);
  return MeasurementProcess(dims, std::move(xi), std::move(u), std::move(meter), std::move(measured),
                            std::move(disturbed), number<double>(doc, "hbar"), tol);
}

void save_process(const MeasurementProcess& proc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path.string());
  out << process_to_json(proc).dump(2) << '\n';
}

MeasurementProcess load_custom(const std::filesystem::path& path, const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("model file is not valid JSON: ") + e.what());
  }
  return process_from_json(doc, tol);
}

}  // namespace edrlab
