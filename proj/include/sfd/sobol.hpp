#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sfd/design.hpp"
#include "sfd/rng.hpp"

namespace sfd {

/// Highest dimension covered by the embedded direction numbers.
inline constexpr std::size_t kSobolMaxDimension = 54;

enum class Scramble { None, OwenNested };

struct SobolConfig {
    std::size_t dimension = 2;
    /// Points dropped from the start; the default drops the origin.
    std::uint64_t skip = 1;
    Scramble scramble = Scramble::None;
    Seed seed;
    /// Bits per coordinate, 1..53. Also bounds the sequence length to 2^bit_depth.
    unsigned bit_depth = 30;
};

/// Sobol' points with indices skip .. skip + n - 1. Unscrambled coordinates
/// are multiples of 2^-bit_depth.
///
/// OwenNested applies nested uniform digit scrambling per coordinate: digit b
/// of a coordinate is flipped by a random bit that depends on the seed, the
/// coordinate, b, and all higher digits of the unscrambled value. The random
/// bits are produced by hashing, so the full scrambling tree is never stored.
///
/// Throws InvalidArgument when n == 0, dimension is 0 or above
/// kSobolMaxDimension, or bit_depth is 0 or above 53.
[[nodiscard]] DesignMatrix generate_sobol(std::size_t n, const SobolConfig& config);

}  // namespace sfd
