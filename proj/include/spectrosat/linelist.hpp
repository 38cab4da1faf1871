#pragma once

// HITRAN-style line catalog: fixed-width record parsing, loading and band queries.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "spectrosat/error.hpp"

namespace spectrosat {

enum class GasSpecies { O2, CO2, CH4 };

inline constexpr std::array<GasSpecies, 3> kAllSpecies{GasSpecies::O2, GasSpecies::CO2,
                                                      GasSpecies::CH4};

/// Dry-air O2 volume mixing ratio used for column normalisation.
inline constexpr double kO2DryAirFraction = 0.2095;

/// HITRAN molecule number.
constexpr int molecule_code(GasSpecies s) {
  switch (s) {
    case GasSpecies::CO2: return 2;
    case GasSpecies::CH4: return 6;
    case GasSpecies::O2: return 7;
  }
  return 0;
}

/// Molar mass of the principal isotopologue, g/mol.
constexpr double molar_mass(GasSpecies s) {
  switch (s) {
    case GasSpecies::CO2: return 43.98983;
    case GasSpecies::CH4: return 16.0313;
    case GasSpecies::O2: return 31.98983;
  }
  return 0.0;
}

constexpr std::string_view species_name(GasSpecies s) {
  switch (s) {
    case GasSpecies::CO2: return "CO2";
    case GasSpecies::CH4: return "CH4";
    case GasSpecies::O2: return "O2";
  }
  return "?";
}

inline std::optional<GasSpecies> species_from_name(std::string_view name) {
  for (auto s : kAllSpecies)
    if (species_name(s) == name) return s;
  return std::nullopt;
}

inline std::optional<GasSpecies> species_from_code(int code) {
  for (auto s : kAllSpecies)
    if (molecule_code(s) == code) return s;
  return std::nullopt;
}

struct SpectralLine {
  int molecule_id = 0;
  int isotopologue = 0;
  double nu0 = 0.0;         // cm^-1
  double intensity = 0.0;   // cm^-1/(molecule cm^-2) at 296 K
  double gamma_air = 0.0;   // cm^-1/atm
  double gamma_self = 0.0;  // cm^-1/atm
  double elower = 0.0;      // cm^-1
  double n_air = 0.0;
  double delta_air = 0.0;   // cm^-1/atm

  friend bool operator==(const SpectralLine&, const SpectralLine&) = default;
};

inline constexpr std::size_t kParRecordLength = 160;

namespace detail {

struct ParField {
  std::size_t offset;
  std::size_t width;
};

// HITRAN 2004 fixed-width layout (zero-based offsets).
inline constexpr ParField kMolecule{0, 2};
inline constexpr ParField kIsotopologue{2, 1};
inline constexpr ParField kNu{3, 12};
inline constexpr ParField kIntensity{15, 10};
inline constexpr ParField kEinsteinA{25, 10};
inline constexpr ParField kGammaAir{35, 5};
inline constexpr ParField kGammaSelf{40, 5};
inline constexpr ParField kElower{45, 10};
inline constexpr ParField kNAir{55, 4};
inline constexpr ParField kDeltaAir{59, 8};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view record, ParField f) {
  auto text = trim(record.substr(f.offset, f.width));
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    fail(ErrorCode::FieldNotNumeric, "offset " + std::to_string(f.offset) + ": '" +
                                         std::string(record.substr(f.offset, f.width)) + "'");
  return value;
}

inline int parse_int(std::string_view record, ParField f) {
  auto text = trim(record.substr(f.offset, f.width));
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    fail(ErrorCode::FieldNotNumeric, "offset " + std::to_string(f.offset) + ": '" +
                                         std::string(record.substr(f.offset, f.width)) + "'");
  return value;
}

// Isotopologue numbers above 9 are written as 0, A, B, ...
inline int parse_isotopologue(std::string_view record) {
  const char c = record[kIsotopologue.offset];
  if (c >= '1' && c <= '9') return c - '0';
  if (c == '0') return 10;
  if (c >= 'A' && c <= 'Z') return 11 + (c - 'A');
  fail(ErrorCode::FieldNotNumeric,
       "offset " + std::to_string(kIsotopologue.offset) + ": '" + std::string(1, c) + "'");
}

}  // namespace detail

/// Parses one 160-character `.par` record. Trailing fields (quantum numbers,
/// uncertainty codes, weights) are ignored.
inline SpectralLine parse_par_record(std::string_view record) {
  while (!record.empty() && (record.back() == '\r' || record.back() == '\n'))
    record.remove_suffix(1);
  if (record.size() < kParRecordLength)
    fail(ErrorCode::RecordTooShort, "record has " + std::to_string(record.size()) +
                                        " characters, expected " +
                                        std::to_string(kParRecordLength));
  using namespace detail;
  SpectralLine line;
  line.molecule_id = parse_int(record, kMolecule);
  line.isotopologue = parse_isotopologue(record);
  line.nu0 = parse_real(record, kNu);
  line.intensity = parse_real(record, kIntensity);
  (void)parse_real(record, kEinsteinA);
  line.gamma_air = parse_real(record, kGammaAir);
  line.gamma_self = parse_real(record, kGammaSelf);
  line.elower = parse_real(record, kElower);
  line.n_air = parse_real(record, kNAir);
  line.delta_air = parse_real(record, kDeltaAir);

  auto out_of_range = [](ParField f, const char* what) {
    fail(ErrorCode::FieldOutOfRange, "offset " + std::to_string(f.offset) + ": " + what);
  };
  if (!(line.nu0 > 0.0)) out_of_range(kNu, "line position must be positive");
  if (line.intensity < 0.0) out_of_range(kIntensity, "negative intensity");
  if (line.gamma_air < 0.0) out_of_range(kGammaAir, "negative air width");
  if (line.gamma_self < 0.0) out_of_range(kGammaSelf, "negative self width");
  if (line.elower < 0.0) out_of_range(kElower, "negative lower-state energy");
  return line;
}

/// Immutable, nu0-sorted line collection with a per-species index.
class LineCatalog {
 public:
  LineCatalog() = default;

  explicit LineCatalog(std::vector<SpectralLine> lines) : lines_(std::move(lines)) {
    std::stable_sort(lines_.begin(), lines_.end(),
                     [](const SpectralLine& a, const SpectralLine& b) { return a.nu0 < b.nu0; });
    for (std::size_t i = 0; i < lines_.size(); ++i)
      species_index_[lines_[i].molecule_id].push_back(i);
  }

  std::span<const SpectralLine> lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }
  bool empty() const { return lines_.empty(); }

  /// Indices into lines() for one molecule code, ascending in nu0.
  std::span<const std::size_t> species_lines(int molecule_id) const {
    auto it = species_index_.find(molecule_id);
    if (it == species_index_.end()) return {};
    return it->second;
  }

  friend bool operator==(const LineCatalog& a, const LineCatalog& b) {
    return a.lines_ == b.lines_;
  }

 private:
  std::vector<SpectralLine> lines_;
  std::map<int, std::vector<std::size_t>> species_index_;
};

struct CatalogDiagnostic {
  std::size_t line_number;  // 1-based
  std::string message;
};

struct CatalogLoad {
  LineCatalog catalog;
  std::vector<CatalogDiagnostic> diagnostics;
};

/// Reads newline-separated records. Malformed records are skipped and reported;
/// blank lines are ignored.
inline CatalogLoad load_catalog(std::istream& source) {
  std::vector<SpectralLine> lines;
  std::vector<CatalogDiagnostic> diagnostics;
  std::string record;
  std::size_t line_number = 0;
  while (std::getline(source, record)) {
    ++line_number;
    if (detail::trim(record).empty() || record == "\r") continue;
    try {
      lines.push_back(parse_par_record(record));
    } catch (const Error& e) {
      diagnostics.push_back({line_number, e.what()});
    }
  }
  if (source.bad()) fail(ErrorCode::IoFailure, "read error after line " + std::to_string(line_number));
  if (lines.empty())
    fail(ErrorCode::EmptyCatalog, "no well-formed records (" +
                                      std::to_string(diagnostics.size()) + " malformed)");
  return {LineCatalog(std::move(lines)), std::move(diagnostics)};
}

/// Lines of one species with nu_min <= nu0 <= nu_max, ascending.
inline std::vector<SpectralLine> query_band(const LineCatalog& catalog, GasSpecies species,
                                            double nu_min, double nu_max) {
  if (!(nu_min < nu_max))
    fail(ErrorCode::InvalidBand, "nu_min must be below nu_max (" + std::to_string(nu_min) +
                                     " >= " + std::to_string(nu_max) + ")");
  auto index = catalog.species_lines(molecule_code(species));
  auto all = catalog.lines();
  auto first = std::lower_bound(index.begin(), index.end(), nu_min,
                                [&](std::size_t i, double v) { return all[i].nu0 < v; });
  std::vector<SpectralLine> out;
  for (auto it = first; it != index.end() && all[*it].nu0 <= nu_max; ++it)
    out.push_back(all[*it]);
  return out;
}

}  // namespace spectrosat
