#pragma once

/// @file io.hpp
/// Text formats shared by the CLI and the library: regions, point patterns,
/// gridded fields and number formatting.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "spatspec/fourier.hpp"
#include "spatspec/geometry.hpp"

namespace spatspec {

/// Shortest round-trip representation with 17 significant digits.
std::string fmt17(double v);

nlohmann::json box_to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);
nlohmann::json scheme_to_json(const SamplingScheme& s);
SamplingScheme scheme_from_json(const nlohmann::json& j, int dim);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Region from a JSON header {bbox, delta_ref[, mask]}. `mask` names a CSV of
/// 0/1 cells (rows = y index, columns = x index) relative to the header; a
/// missing mask means the full box.
Region read_region(const std::filesystem::path& header);
/// Same from a parsed header; the mask path is relative to `base`.
Region region_from_header(const nlohmann::json& j, const std::filesystem::path& base);
void write_region(const Region& region, const std::filesystem::path& header);

/// CSV with header x[,y][,mark].
PointPattern read_points(const std::filesystem::path& path, int dim);
void write_points(const PointPattern& pattern, const std::filesystem::path& path);

/// CSV with header ix,iy,value; node indices are absolute grid indices z.
/// The scheme lives in the JSON header next to it.
GriddedField read_field(const std::filesystem::path& csv, const SamplingScheme& scheme,
                        const Region& region);
void write_field(const GriddedField& field, const std::filesystem::path& csv);

/// Splits a CSV line on commas (no quoting).
std::vector<std::string> split_csv(const std::string& line);

}  // namespace spatspec
