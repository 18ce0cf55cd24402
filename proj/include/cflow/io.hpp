#ifndef CFLOW_IO_HPP
#define CFLOW_IO_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "cflow/fields.hpp"
#include "cflow/flow.hpp"
#include "cflow/losses.hpp"
#include "cflow/refine.hpp"
#include "cflow/report.hpp"

namespace cflow::io {

namespace detail {

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

// Cursor over a PNM header: whitespace-separated ASCII tokens with '#' comments.
class PnmCursor {
 public:
  explicit PnmCursor(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#')
      out.push_back(static_cast<char>(bytes_[pos_++]));
    return out;
  }

  unsigned long number(const char* what) {
    const std::string t = token();
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
      throw Error(ErrorKind::MalformedHeader, std::string("expected ") + what + ", got '" + t + "'");
    return std::stoul(t);
  }

  // Exactly one whitespace byte separates the header from a binary raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw Error(ErrorKind::MalformedHeader, "missing whitespace after maxval");
    ++pos_;
  }

  std::size_t pos() const noexcept { return pos_; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>((v >> (8 * k)) & 0xFFu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

// --- PGM -------------------------------------------------------------------

/// Reads a P5 or P2 graymap with maxval <= 255. Values are returned unscaled.
inline ScalarField read_pgm(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = detail::read_bytes(path);
  detail::PnmCursor cur(bytes);
  const std::string magic = cur.token();
  if (magic != "P5" && magic != "P2")
    throw Error(ErrorKind::MalformedHeader, path.string() + ": not a P2/P5 graymap");
  const unsigned long width = cur.number("width");
  const unsigned long height = cur.number("height");
  const unsigned long maxval = cur.number("maxval");
  if (width == 0 || height == 0)
    throw Error(ErrorKind::MalformedHeader, path.string() + ": zero image extent");
  if (maxval == 0) throw Error(ErrorKind::MalformedHeader, path.string() + ": maxval is 0");
  if (maxval > 255)
    throw Error(ErrorKind::UnsupportedMaxval,
                path.string() + ": maxval " + std::to_string(maxval) + " exceeds 255");

  const GridShape shape(height, width);
  ScalarField out(shape);
  if (magic == "P5") {
    cur.single_space();
    const std::size_t expected = shape.size();
    const std::size_t actual = bytes.size() - cur.pos();
    if (actual < expected)
      throw Error(ErrorKind::Truncated, path.string() + ": expected " + std::to_string(expected) +
                                            " pixel bytes, found " + std::to_string(actual));
    for (std::size_t i = 0; i < expected; ++i) {
      const unsigned v = bytes[cur.pos() + i];
      if (v > maxval) throw Error(ErrorKind::MalformedHeader, path.string() + ": pixel exceeds maxval");
      out[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < shape.size(); ++i) {
      const std::string t = cur.token();
      if (t.empty())
        throw Error(ErrorKind::Truncated, path.string() + ": expected " +
                                              std::to_string(shape.size()) + " samples, found " +
                                              std::to_string(i));
      if (!std::all_of(t.begin(), t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        throw Error(ErrorKind::MalformedHeader, path.string() + ": bad sample '" + t + "'");
      const unsigned long v = std::stoul(t);
      if (v > maxval) throw Error(ErrorKind::MalformedHeader, path.string() + ": pixel exceeds maxval");
      out[i] = static_cast<double>(v);
    }
  }
  return out;
}

/// Graymap as a mask: value >= 128 is foreground.
inline BinaryMask read_pgm_mask(const std::filesystem::path& path) {
  const ScalarField img = read_pgm(path);
  BinaryMask out(img.shape());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i] >= 128.0 ? 1 : 0;
  return out;
}

/// Writes P5 with maxval 255; values are rounded and clamped to [0, 255].
inline void write_pgm(const std::filesystem::path& path, const ScalarField& image) {
  if (image.shape().ndim() != 2)
    throw Error(ErrorKind::Dimensionality, "PGM holds 2D images only");
  const std::string header = "P5\n" + std::to_string(image.shape().cols()) + " " +
                             std::to_string(image.shape().rows()) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + image.size());
  for (double v : image)
    bytes.push_back(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 255.0))));
  detail::write_bytes(path, bytes);
}

inline void write_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  ScalarField img(mask.shape());
  for (std::size_t i = 0; i < mask.size(); ++i) img[i] = mask[i] ? 255.0 : 0.0;
  write_pgm(path, img);
}

// --- CFF1 field files --------------------------------------------------------
//
// "CFF1" | ndim:u8 | nchan:u8 | dims: ndim x u32 LE (rows, cols[, slices]) |
// payload: float32 LE, row-major, channel-interleaved.

struct FieldFile {
  GridShape shape;
  std::size_t channels = 1;
  std::vector<float> payload;
};

inline void write_field_file(const std::filesystem::path& path, const FieldFile& f) {
  if (f.channels != 1 && f.channels != static_cast<std::size_t>(f.shape.ndim()))
    throw Error(ErrorKind::InvalidArgument, "channel count must be 1 or the grid dimension");
  if (f.payload.size() != f.shape.size() * f.channels)
    throw Error(ErrorKind::ShapeMismatch, "payload size does not match header");
  std::vector<unsigned char> bytes{'C', 'F', 'F', '1'};
  bytes.push_back(static_cast<unsigned char>(f.shape.ndim()));
  bytes.push_back(static_cast<unsigned char>(f.channels));
  for (std::size_t d : f.shape.extents()) {
    if (d > 0xFFFFFFFFu) throw Error(ErrorKind::InvalidArgument, "extent exceeds 32 bits");
    detail::put_u32(bytes, static_cast<std::uint32_t>(d));
  }
  bytes.reserve(bytes.size() + 4 * f.payload.size());
  for (float v : f.payload) detail::put_u32(bytes, std::bit_cast<std::uint32_t>(v));
  detail::write_bytes(path, bytes);
}

inline FieldFile read_field_file(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = detail::read_bytes(path);
  if (bytes.size() < 6 || std::memcmp(bytes.data(), "CFF1", 4) != 0)
    throw Error(ErrorKind::BadMagic, path.string() + ": not a CFF1 field file");
  const int ndim = bytes[4];
  const std::size_t nchan = bytes[5];
  if (ndim != 2 && ndim != 3)
    throw Error(ErrorKind::Dimensionality, path.string() + ": ndim " + std::to_string(ndim));
  if (nchan != 1 && nchan != static_cast<std::size_t>(ndim))
    throw Error(ErrorKind::Dimensionality,
                path.string() + ": " + std::to_string(nchan) + " channels on a " +
                    std::to_string(ndim) + "D grid");
  const std::size_t header = 6 + 4 * static_cast<std::size_t>(ndim);
  if (bytes.size() < header)
    throw Error(ErrorKind::Truncated, path.string() + ": header needs " + std::to_string(header) +
                                          " bytes, found " + std::to_string(bytes.size()));
  std::vector<std::size_t> dims;
  for (int a = 0; a < ndim; ++a) {
    const std::uint32_t d = detail::get_u32(bytes.data() + 6 + 4 * a);
    if (d == 0) throw Error(ErrorKind::MalformedHeader, path.string() + ": zero extent");
    dims.push_back(d);
  }
  FieldFile f{GridShape::from_extents(dims), nchan, {}};
  const std::size_t expected = 4 * f.shape.size() * nchan;
  const std::size_t actual = bytes.size() - header;
  if (actual != expected)
    throw Error(ErrorKind::Truncated, path.string() + ": expected " + std::to_string(expected) +
                                          " payload bytes, found " + std::to_string(actual));
  f.payload.resize(f.shape.size() * nchan);
  for (std::size_t k = 0; k < f.payload.size(); ++k)
    f.payload[k] = std::bit_cast<float>(detail::get_u32(bytes.data() + header + 4 * k));
  return f;
}

inline void write_field(const std::filesystem::path& path, const ScalarField& field) {
  FieldFile f{field.shape(), 1, {}};
  f.payload.reserve(field.size());
  for (double v : field) f.payload.push_back(static_cast<float>(v));
  write_field_file(path, f);
}

inline void write_field(const std::filesystem::path& path, const VectorField& field) {
  FieldFile f{field.shape(), field.channels(), {}};
  f.payload.reserve(field.values().size());
  for (double v : field.values()) f.payload.push_back(static_cast<float>(v));
  write_field_file(path, f);
}

inline ScalarField read_scalar_field(const std::filesystem::path& path) {
  const FieldFile f = read_field_file(path);
  if (f.channels != 1)
    throw Error(ErrorKind::Dimensionality, path.string() + ": expected a scalar field, found " +
                                               std::to_string(f.channels) + " channels");
  return ScalarField(f.shape, std::vector<double>(f.payload.begin(), f.payload.end()));
}

inline VectorField read_vector_field(const std::filesystem::path& path) {
  const FieldFile f = read_field_file(path);
  if (f.channels == 1)
    throw Error(ErrorKind::Dimensionality, path.string() + ": expected a vector field");
  return VectorField(f.shape, std::vector<double>(f.payload.begin(), f.payload.end()));
}

/// Undefined flow pixels are stored as zero vectors, so a pixel is treated as
/// defined when any component is non-zero.
inline ContourFlow flow_from_field(VectorField field) {
  BinaryMask defined(field.shape());
  for (std::size_t i = 0; i < field.pixel_count(); ++i)
    for (std::size_t ch = 0; ch < field.channels(); ++ch)
      if (field(i, ch) != 0.0) defined[i] = 1;
  return {std::move(field), std::move(defined)};
}

inline ContourFlow read_flow(const std::filesystem::path& path) {
  return flow_from_field(read_vector_field(path));
}

// --- JSON reports -------------------------------------------------------------

using nlohmann::json;

inline json to_json(const MetricsReport& r) {
  json j = json::object();
  if (r.dice_percent) j["dice_percent"] = *r.dice_percent;
  if (r.bd) j["bd"] = *r.bd;
  if (r.bdsd) j["bdsd"] = *r.bdsd;
  if (r.acs) j["acs"] = *r.acs;
  if (r.epe) j["epe"] = *r.epe;
  if (r.ade) j["ade"] = *r.ade;
  for (const auto& [k, v] : r.aux) j[k] = v;
  return j;
}

inline json to_json(const LossValue& l) {
  json j = json::object();
  j["loss_total"] = l.total;
  j["pixel_count"] = l.pixel_count;
  j["loss_mean"] = l.pixel_count ? l.total / static_cast<double>(l.pixel_count) : 0.0;
  j["per_term"] = l.per_term;
  return j;
}

inline json to_json(const RefineTrace& t) {
  json j = json::object();
  j["iterations"] = t.size();
  j["orthogonality"] = t.orthogonality;
  j["linear_energy"] = t.linear_energy;
  j["entropy_energy"] = t.entropy_energy;
  j["dual_step"] = t.dual_step;
  return j;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

template <typename Report>
void write_report(const std::filesystem::path& path, const Report& report) {
  write_json(path, to_json(report));
}

}  // namespace cflow::io

#endif  // CFLOW_IO_HPP
