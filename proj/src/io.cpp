#include "dcurv/io.hpp"

#include "dcurv/error.hpp"
#include "dcurv/geometry.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dcurv {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool is_numeric(const std::string& field) {
    double ignored = 0.0;
    return parse_double(field, ignored);
}

void write_block(std::ostream& out, const std::array<char, 4>& magic, const Matrix& m) {
    binary::write_magic(out, magic);
    binary::write_u32(out, static_cast<std::uint32_t>(m.rows()));
    binary::write_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) binary::write_f64(out, m(i, j));
}

Matrix read_block(std::istream& in, const std::array<char, 4>& magic) {
    binary::expect_magic(in, magic);
    const auto rows = binary::read_u32(in);
    const auto cols = binary::read_u32(in);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = binary::read_f64(in);
    return m;
}

template <typename T>
T to_little_endian(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        std::memcpy(&v, bytes, sizeof(T));
    }
    return v;
}

template <typename T>
void write_raw(std::ostream& out, T v) {
    v = to_little_endian(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
    require(static_cast<bool>(out), ErrorKind::Io, "binary write failed");
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(static_cast<bool>(in), ErrorKind::Io, "unexpected end of binary stream");
    return to_little_endian(v);
}

}  // namespace

namespace binary {
void write_magic(std::ostream& out, const std::array<char, 4>& magic) { out.write(magic.data(), 4); }
void expect_magic(std::istream& in, const std::array<char, 4>& magic) {
    std::array<char, 4> got{};
    in.read(got.data(), 4);
    require(static_cast<bool>(in) && got == magic, ErrorKind::Io,
            "bad magic, expected " + std::string(magic.data(), 4));
}
void write_u32(std::ostream& out, std::uint32_t v) { write_raw(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { write_raw(out, v); }
void write_f64(std::ostream& out, double v) { write_raw(out, v); }
std::uint32_t read_u32(std::istream& in) { return read_raw<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_raw<std::uint64_t>(in); }
double read_f64(std::istream& in) { return read_raw<double>(in); }
}  // namespace binary

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

CsvTable read_csv(const fs::path& path, std::optional<bool> has_header) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty() || line.front() == '#') continue;
        auto fields = split_fields(line);
        if (first) {
            first = false;
            bool header = false;
            if (has_header) {
                header = *has_header;
            } else {
                for (const auto& f : fields) header = header || !is_numeric(f);
                // a lone non-numeric first field followed by numbers is an id, not a header
                if (header && fields.size() > 1) {
                    header = false;
                    for (std::size_t i = 1; i < fields.size(); ++i) header = header || !is_numeric(fields[i]);
                }
            }
            if (header) {
                table.header = std::move(fields);
                continue;
            }
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    };
    if (!header.empty()) append_row(header);
    for (const auto& row : rows) append_row(row);
    return out;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
    out << to_csv(header, rows);
    require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

PointCloud read_cloud_csv(const fs::path& path) {
    const CsvTable table = read_csv(path);
    require(!table.rows.empty(), ErrorKind::InvalidInput, "no data rows in " + path.string());
    const bool has_ids = !table.rows.front().empty() && !is_numeric(table.rows.front().front());
    const std::size_t offset = has_ids ? 1 : 0;
    const std::size_t width = table.rows.front().size();
    require(width > offset, ErrorKind::InvalidInput, "no coordinate columns in " + path.string());

    Matrix points(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(width - offset));
    std::vector<std::string> ids;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        require(row.size() == width, ErrorKind::InvalidInput,
                "ragged row " + std::to_string(r + 1) + " in " + path.string());
        if (has_ids) ids.push_back(row.front());
        for (std::size_t c = offset; c < width; ++c) {
            double v = 0.0;
            require(parse_double(row[c], v), ErrorKind::InvalidInput,
                    "non-numeric coordinate '" + row[c] + "' in " + path.string());
            points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - offset)) = v;
        }
    }
    return PointCloud(std::move(points), std::move(ids));
}

void write_cloud_csv(const fs::path& path, const PointCloud& cloud) {
    std::vector<std::string> header;
    if (cloud.has_ids()) header.emplace_back("point_id");
    for (Index j = 0; j < cloud.dim(); ++j) header.push_back("x" + std::to_string(j));
    std::vector<std::vector<std::string>> rows;
    rows.reserve(cloud.size());
    for (Index i = 0; i < cloud.size(); ++i) {
        std::vector<std::string> row;
        if (cloud.has_ids()) row.push_back(cloud.ids()[i]);
        for (Index j = 0; j < cloud.dim(); ++j)
            row.push_back(format_double(cloud.points()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

void write_cloud_binary(std::ostream& out, const PointCloud& cloud) { write_block(out, kCloudMagic, cloud.points()); }

PointCloud read_cloud_binary(std::istream& in) { return PointCloud(read_block(in, kCloudMagic)); }

void write_operator_binary(std::ostream& out, const DiffusionOperator& op) {
    write_block(out, kOperatorMagic, op.p());
    for (Eigen::Index i = 0; i < op.degrees().size(); ++i) binary::write_f64(out, op.degrees()[i]);
}

DiffusionOperator read_operator_binary(std::istream& in) {
    Matrix p = read_block(in, kOperatorMagic);
    require(p.rows() == p.cols(), ErrorKind::Io, "operator block is not square");
    Vector degrees(p.rows());
    for (Eigen::Index i = 0; i < degrees.size(); ++i) degrees[i] = binary::read_f64(in);
    return DiffusionOperator::from_matrix(std::move(p), std::move(degrees));
}

void write_map_binary(std::ostream& out, const DiffusionMap& map) {
    write_block(out, kMapMagic, map.eigenvectors);
    binary::write_u32(out, static_cast<std::uint32_t>(map.t));
    for (Eigen::Index j = 0; j < map.eigenvalues.size(); ++j) binary::write_f64(out, map.eigenvalues[j]);
}

DiffusionMap read_map_binary(std::istream& in) {
    DiffusionMap map;
    map.eigenvectors = read_block(in, kMapMagic);
    map.t = static_cast<int>(binary::read_u32(in));
    map.eigenvalues.resize(map.eigenvectors.cols());
    for (Eigen::Index j = 0; j < map.eigenvalues.size(); ++j) map.eigenvalues[j] = binary::read_f64(in);
    return map;
}

PointCloud load_cloud(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".bin" || ext == ".dcpc") {
        std::ifstream in(path, std::ios::binary);
        require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
        return read_cloud_binary(in);
    }
    return read_cloud_csv(path);
}

}  // namespace dcurv
