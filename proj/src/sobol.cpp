#include "sfd/sobol.hpp"

#include <bit>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "sfd/errors.hpp"
#include "sobol_table.hpp"

namespace sfd {

namespace {

// Direction numbers V_1..V_B of one coordinate as B-bit integers
// (V_k = m_k * 2^(B - k)).
std::vector<std::uint64_t> direction_numbers(std::size_t dim, unsigned bits) {
    std::vector<std::uint64_t> m(bits + 1, 0);
    const auto& entry = detail::kSobolTable[dim];
    if (dim == 0) {
        for (unsigned k = 1; k <= bits; ++k) m[k] = 1;
    } else {
        const unsigned s = static_cast<unsigned>(std::bit_width(entry.polynomial)) - 1;
        for (unsigned k = 1; k <= bits && k <= s; ++k) m[k] = entry.initial[k - 1];
        for (unsigned k = s + 1; k <= bits; ++k) {
            std::uint64_t next = m[k - s] ^ (m[k - s] << s);
            for (unsigned i = 1; i < s; ++i) {
                if ((entry.polynomial >> (s - i)) & 1U) next ^= m[k - i] << i;
            }
            m[k] = next;
        }
    }
    std::vector<std::uint64_t> v(bits);
    for (unsigned k = 1; k <= bits; ++k) v[k - 1] = m[k] << (bits - k);
    return v;
}

std::uint64_t owen_scramble(std::uint64_t x, unsigned bits, std::uint64_t coord_key) {
    std::uint64_t flips = 0;
    for (unsigned t = 1; t <= bits; ++t) {
        const std::uint64_t prefix = t == 1 ? 0 : x >> (bits - t + 1);
        std::uint64_t h = mix64(coord_key ^ mix64(t));
        h = mix64(h ^ prefix);
        flips |= (h >> 63) << (bits - t);
    }
    return x ^ flips;
}

}  // namespace

DesignMatrix generate_sobol(std::size_t n, const SobolConfig& config) {
    if (n == 0) throw InvalidArgument("Sobol' generator needs n >= 1");
    if (config.dimension == 0 || config.dimension > kSobolMaxDimension) {
        throw InvalidArgument(fmt::format("Sobol' dimension {} outside the embedded table (1..{})", config.dimension,
                                          kSobolMaxDimension));
    }
    if (config.bit_depth == 0 || config.bit_depth > 53) {
        throw InvalidArgument(fmt::format("bit depth {} outside 1..53", config.bit_depth));
    }
    const unsigned bits = config.bit_depth;
    const std::uint64_t limit = std::uint64_t{1} << bits;
    if (config.skip >= limit || n > limit - config.skip) {
        throw InvalidArgument(fmt::format("{} points after skipping {} exceed 2^{}", n, config.skip, bits));
    }
    const std::size_t d = config.dimension;
    std::vector<std::vector<std::uint64_t>> v(d);
    std::vector<std::uint64_t> keys(d);
    for (std::size_t j = 0; j < d; ++j) {
        v[j] = direction_numbers(j, bits);
        keys[j] = mix64(config.seed.value ^ mix64(0x9d2c5680u + j));
    }
    const double scale = std::ldexp(1.0, -static_cast<int>(bits));
    std::vector<double> values(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t index = config.skip + i;
        const std::uint64_t gray = index ^ (index >> 1);
        for (std::size_t j = 0; j < d; ++j) {
            std::uint64_t x = 0;
            for (unsigned k = 0; k < bits && (gray >> k) != 0; ++k) {
                if ((gray >> k) & 1U) x ^= v[j][k];
            }
            if (config.scramble == Scramble::OwenNested) x = owen_scramble(x, bits, keys[j]);
            values[i * d + j] = static_cast<double>(x) * scale;
        }
    }
    return DesignMatrix(n, d, std::move(values));
}

}  // namespace sfd
