#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sfd/design.hpp"

namespace sfd {

/// Design CSV:
///
///     # sfd-design n=<N> d=<d>
///     x1,...,xd
///     <N rows, 17 significant digits>
///
/// The reader accepts files without the comment line and without the header.
void write_design_csv(std::ostream& out, const DesignMatrix& design);
[[nodiscard]] std::string design_to_csv(const DesignMatrix& design);

/// Throws ParseError on empty input, ragged rows, non-numeric cells, entries
/// outside [0, 1] or a comment line that disagrees with the data.
[[nodiscard]] DesignMatrix read_design_csv(std::istream& in);
[[nodiscard]] DesignMatrix read_design_csv(const std::filesystem::path& path);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace sfd
