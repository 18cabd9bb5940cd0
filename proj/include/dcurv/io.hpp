#pragma once

#include "dcurv/point_cloud.hpp"
#include "dcurv/types.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcurv {

class DiffusionOperator;
struct DiffusionMap;

// Binary container, little-endian throughout:
//   char[4] magic | u32 rows | u32 cols | rows*cols float64, row-major | trailer
// DCPC (point cloud): no trailer.
// DCOP (diffusion operator): P is N x N; trailer is N float64 degrees.
// DCMP (diffusion map): eigenvector matrix N x m; trailer is u32 t then m float64 eigenvalues.
inline constexpr std::array<char, 4> kCloudMagic{'D', 'C', 'P', 'C'};
inline constexpr std::array<char, 4> kOperatorMagic{'D', 'C', 'O', 'P'};
inline constexpr std::array<char, 4> kMapMagic{'D', 'C', 'M', 'P'};

/// Formats with 17 significant digits (round-trip exact for float64).
std::string format_double(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position by header name, if present.
    std::optional<std::size_t> column(std::string_view name) const;
};

/// Reads comma-separated rows. When has_header is unset, the first row is treated
/// as a header if any of its fields is non-numeric.
CsvTable read_csv(const std::filesystem::path& path, std::optional<bool> has_header = std::nullopt);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

bool parse_double(std::string_view text, double& out);

/// One point per row; optional header; a leading id column is detected by a
/// non-numeric first field in the first data row.
PointCloud read_cloud_csv(const std::filesystem::path& path);
void write_cloud_csv(const std::filesystem::path& path, const PointCloud& cloud);

// Binary readers/writers for the containers above. Streams must be opened in binary mode.
void write_cloud_binary(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud_binary(std::istream& in);
void write_operator_binary(std::ostream& out, const DiffusionOperator& op);
DiffusionOperator read_operator_binary(std::istream& in);
void write_map_binary(std::ostream& out, const DiffusionMap& map);
DiffusionMap read_map_binary(std::istream& in);

/// Dispatches on extension: ".bin"/".dcpc" binary, anything else CSV.
PointCloud load_cloud(const std::filesystem::path& path);

namespace binary {
void write_magic(std::ostream& out, const std::array<char, 4>& magic);
void expect_magic(std::istream& in, const std::array<char, 4>& magic);
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
}  // namespace binary

}  // namespace dcurv
