#pragma once

#include "arcfit/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace arcfit::io {

enum class CloudFormat { Xyz, Ply };

CloudFormat parse_format(const std::string& name);
CloudFormat format_for(const std::filesystem::path& path);

/// `x y z [w] [label]` per line; `#` starts a comment. Every data line must have
/// the same number of columns.
PointCloud read_xyz(std::istream& in, const std::string& source = "<xyz>");
/// ASCII PLY with a `vertex` element (x, y, z and optional weight, label).
PointCloud read_ply(std::istream& in, const std::string& source = "<ply>");

void write_xyz(std::ostream& out, const PointCloud& cloud);
void write_ply(std::ostream& out, const PointCloud& cloud);

PointCloud read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format);

/// One value per line, or the `weight` property when the file is a PLY.
std::vector<double> read_weights(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace arcfit::io
