#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace sfd::detail {

inline constexpr std::size_t kSobolTableDimensions = 54;

struct SobolDirection {
    std::uint32_t polynomial;
    std::vector<std::uint32_t> initial;
};

extern const std::array<SobolDirection, kSobolTableDimensions> kSobolTable;

}  // namespace sfd::detail
