#include "sfd/design_io.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "sfd/errors.hpp"

namespace sfd {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view cell) {
    cell = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

// "# sfd-design n=<N> d=<d>"
std::optional<std::pair<std::size_t, std::size_t>> parse_comment(std::string_view line) {
    std::size_t n = 0;
    std::size_t d = 0;
    std::istringstream in{std::string(line)};
    std::string hash, tag, nf, df;
    in >> hash >> tag >> nf >> df;
    if (hash != "#" || tag != "sfd-design") return std::nullopt;
    if (nf.rfind("n=", 0) != 0 || df.rfind("d=", 0) != 0) return std::nullopt;
    try {
        n = std::stoul(nf.substr(2));
        d = std::stoul(df.substr(2));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return std::pair{n, d};
}

}  // namespace

void write_design_csv(std::ostream& out, const DesignMatrix& design) {
    out << design_to_csv(design);
}

std::string design_to_csv(const DesignMatrix& design) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "# sfd-design n={} d={}\n", design.n_points(), design.n_dims());
    for (std::size_t j = 0; j < design.n_dims(); ++j) {
        fmt::format_to(std::back_inserter(buf), "{}x{}", j == 0 ? "" : ",", j + 1);
    }
    buf.push_back('\n');
    for (std::size_t i = 0; i < design.n_points(); ++i) {
        for (std::size_t j = 0; j < design.n_dims(); ++j) {
            fmt::format_to(std::back_inserter(buf), "{}{:.17g}", j == 0 ? "" : ",", design(i, j));
        }
        buf.push_back('\n');
    }
    return fmt::to_string(buf);
}

DesignMatrix read_design_csv(std::istream& in) {
    std::optional<std::pair<std::size_t, std::size_t>> declared;
    std::vector<double> values;
    std::size_t d = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '#') {
            if (auto c = parse_comment(body)) {
                if (declared || rows > 0) throw ParseError(fmt::format("line {}: unexpected design comment", line_no));
                declared = c;
            }
            continue;
        }
        const auto cells = split(body);
        if (header_allowed && !parse_double(cells.front())) {
            header_allowed = false;
            d = cells.size();
            continue;
        }
        header_allowed = false;
        if (d == 0) d = cells.size();
        if (cells.size() != d) {
            throw ParseError(fmt::format("line {}: expected {} columns, found {}", line_no, d, cells.size()));
        }
        for (const auto cell : cells) {
            const auto v = parse_double(cell);
            if (!v) throw ParseError(fmt::format("line {}: cannot parse '{}' as a number", line_no, cell));
            if (!(*v >= 0.0 && *v <= 1.0)) throw ParseError(fmt::format("line {}: value {} outside [0, 1]", line_no, *v));
            values.push_back(*v);
        }
        ++rows;
    }
    if (rows == 0) throw ParseError("design file contains no data rows");
    if (declared && (declared->first != rows || declared->second != d)) {
        throw ParseError(fmt::format("comment declares n={} d={}, data has n={} d={}", declared->first,
                                     declared->second, rows, d));
    }
    return DesignMatrix(rows, d, std::move(values));
}

DesignMatrix read_design_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open design file '{}'", path.string()));
    return read_design_csv(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out << contents;
        if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sfd
