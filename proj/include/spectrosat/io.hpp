#pragma once

// File formats and bit-stable I/O: shortest round-trip number formatting,
// write-to-temp-then-rename, SHA-256 digests, spectrum and interferogram CSV.

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "spectrosat/error.hpp"
#include "spectrosat/instrument.hpp"
#include "spectrosat/spectrum.hpp"

namespace spectrosat::io {

namespace fs = std::filesystem;

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoFailure, "read error on " + path.string());
  return ss.str();
}

/// Writes `content` next to `path` under a temporary name, then renames it
/// into place, so readers never see a partial file.
inline void atomic_write(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorCode::IoFailure, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::IoFailure, "cannot move " + tmp.string() + " to " + path.string());
  }
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    fail(ErrorCode::IoFailure, "cannot create directory " + dir.string() +
                                   (ec ? ": " + ec.message() : std::string()));
}

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::IoFailure, "SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

inline std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

namespace detail {

/// Line-oriented reader that reports "file:line: message" on failure.
class LineReader {
 public:
  LineReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto end = text_.find('\n', pos_);
    line = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    ++line_no_;
    return true;
  }

  [[noreturn]] void error(const std::string& message) const {
    fail(ErrorCode::IoFailure, source_ + ":" + std::to_string(line_no_) + ": " + message);
  }

 private:
  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

inline std::pair<std::string_view, std::string_view> split_pair(std::string_view line, char sep) {
  const auto p = line.find(sep);
  if (p == std::string_view::npos) return {line, {}};
  return {line.substr(0, p), line.substr(p + 1)};
}

}  // namespace detail

inline constexpr std::string_view kSpectrumHeader = "wavenumber_cm-1,value";
inline constexpr std::string_view kInterferogramHeader = "index,value";

inline std::optional<SpectrumKind> spectrum_kind_from_name(std::string_view name) {
  for (auto k : {SpectrumKind::Transmittance, SpectrumKind::Radiance, SpectrumKind::Recovered,
                 SpectrumKind::OpticalDepth})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

/// `# kind=`, `# nu_start=`, `# nu_step=` comment lines, the header, then one row per point.
inline std::string spectrum_to_csv(const Spectrum& s) {
  std::string out;
  out.reserve(48 * s.size() + 128);
  out += "# kind=" + std::string(kind_name(s.kind)) + "\n";
  out += "# nu_start=" + format_double(s.grid.nu_start) + "\n";
  out += "# nu_step=" + format_double(s.grid.nu_step) + "\n";
  out += kSpectrumHeader;
  out += '\n';
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += format_double(s.nu(k));
    out += ',';
    out += format_double(s.values[k]);
    out += '\n';
  }
  return out;
}

/// Inverse of spectrum_to_csv. Without the comment lines the grid is taken
/// from the first two rows and the kind defaults to Transmittance.
inline Spectrum spectrum_from_csv(std::string_view text, const std::string& source) {
  detail::LineReader reader(text, source);
  std::string_view line;
  SpectrumKind kind = SpectrumKind::Transmittance;
  std::optional<double> start, step;
  bool header = false;
  std::vector<double> nus, values;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto [key, value] = detail::split_pair(line.substr(1), '=');
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      if (key == "kind") {
        auto k = spectrum_kind_from_name(value);
        if (!k) reader.error("unknown spectrum kind '" + std::string(value) + "'");
        kind = *k;
      } else if (key == "nu_start" || key == "nu_step") {
        auto v = parse_double(value);
        if (!v) reader.error("bad number in " + std::string(key));
        (key == "nu_start" ? start : step) = *v;
      }
      continue;
    }
    if (!header) {
      if (line != kSpectrumHeader)
        reader.error("expected header '" + std::string(kSpectrumHeader) + "', found '" +
                     std::string(line) + "'");
      header = true;
      continue;
    }
    auto [a, b] = detail::split_pair(line, ',');
    auto nu = parse_double(a);
    auto v = parse_double(b);
    if (!nu || !v) reader.error("expected two numbers, found '" + std::string(line) + "'");
    nus.push_back(*nu);
    values.push_back(*v);
  }
  if (!header) fail(ErrorCode::IoFailure, source + ": missing header line");
  if (values.size() < 2) fail(ErrorCode::IoFailure, source + ": fewer than two data rows");
  const double nu0 = start.value_or(nus[0]);
  const double dnu = step.value_or(nus[1] - nus[0]);
  if (!(dnu > 0.0)) fail(ErrorCode::IoFailure, source + ": wavenumbers must increase");
  const SpectralGrid grid(nu0, dnu, values.size());
  for (std::size_t k = 0; k < nus.size(); ++k)
    if (std::abs(nus[k] - grid.at(k)) > 1e-6 * dnu)
      fail(ErrorCode::IoFailure, source + ": row " + std::to_string(k + 1) +
                                     " breaks the uniform grid (" + format_double(nus[k]) + ")");
  return Spectrum(grid, std::move(values), kind);
}

inline std::string interferogram_to_csv(const Interferogram& f) {
  std::string out;
  out.reserve(32 * f.size() + 192);
  out += "# lambda_ref_nm=" + format_double(f.lambda_ref) + "\n";
  out += "# opd_step_cm=" + format_double(f.opd_step) + "\n";
  out += "# n_samples=" + std::to_string(f.size()) + "\n";
  out += "# channel=" + std::string(detector_name(f.channel)) + "\n";
  out += "# seed=" + (f.seed ? std::to_string(*f.seed) : std::string("none")) + "\n";
  out += kInterferogramHeader;
  out += '\n';
  for (std::size_t k = 0; k < f.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_double(f.samples[k]);
    out += '\n';
  }
  return out;
}

inline Interferogram interferogram_from_csv(std::string_view text, const std::string& source) {
  detail::LineReader reader(text, source);
  std::string_view line;
  Interferogram f;
  f.opd_step = 0.0;
  std::optional<std::uint64_t> declared;
  bool header = false;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto [key, value] = detail::split_pair(line.substr(1), '=');
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      if (key == "lambda_ref_nm" || key == "opd_step_cm") {
        auto v = parse_double(value);
        if (!v || !(*v > 0.0)) reader.error("bad value for " + std::string(key));
        (key == "lambda_ref_nm" ? f.lambda_ref : f.opd_step) = *v;
      } else if (key == "n_samples") {
        declared = parse_uint(value);
        if (!declared) reader.error("bad n_samples");
      } else if (key == "channel") {
        auto c = detector_from_name(value);
        if (!c) reader.error("unknown channel '" + std::string(value) + "'");
        f.channel = *c;
      } else if (key == "seed") {
        if (value != "none") {
          f.seed = parse_uint(value);
          if (!f.seed) reader.error("bad seed");
        }
      }
      continue;
    }
    if (!header) {
      if (line != kInterferogramHeader)
        reader.error("expected header '" + std::string(kInterferogramHeader) + "', found '" +
                     std::string(line) + "'");
      header = true;
      continue;
    }
    auto [a, b] = detail::split_pair(line, ',');
    auto idx = parse_uint(a);
    auto v = parse_double(b);
    if (!idx || !v) reader.error("expected index,value, found '" + std::string(line) + "'");
    if (*idx != f.samples.size()) reader.error("sample index out of sequence");
    f.samples.push_back(*v);
  }
  if (!header) fail(ErrorCode::IoFailure, source + ": missing header line");
  if (!(f.opd_step > 0.0)) fail(ErrorCode::IoFailure, source + ": missing opd_step_cm");
  if (declared && *declared != f.samples.size())
    fail(ErrorCode::IoFailure, source + ": n_samples says " + std::to_string(*declared) + " but " +
                                   std::to_string(f.samples.size()) + " rows follow");
  if (f.samples.size() < 2) fail(ErrorCode::IoFailure, source + ": fewer than two samples");
  return f;
}

inline void write_spectrum(const fs::path& path, const Spectrum& s) {
  atomic_write(path, spectrum_to_csv(s));
}
inline Spectrum read_spectrum(const fs::path& path) {
  return spectrum_from_csv(read_file(path), path.string());
}
inline void write_interferogram(const fs::path& path, const Interferogram& f) {
  atomic_write(path, interferogram_to_csv(f));
}
inline Interferogram read_interferogram(const fs::path& path) {
  return interferogram_from_csv(read_file(path), path.string());
}

}  // namespace spectrosat::io
