#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace hvroc {

// Philox4x32-10 counter-based generator.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter c, Key k)
    {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(M0) * c[0];
            const std::uint64_t p1 = std::uint64_t(M1) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
                 std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
            k[0] += W0;
            k[1] += W1;
        }
        return c;
    }
};

// Standard normals addressed by (seed, stream, step, slot). Each Philox block yields two.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          stream_lo_(std::uint32_t(stream)), stream_hi_(std::uint32_t(stream >> 32)) {}

    // Fills out[0..count) with the normals of the given step.
    template <class Out>
    void normals(std::uint32_t step, int count, Out&& out) const
    {
        for (int j = 0; 2 * j < count; ++j) {
            const auto r = Philox4x32::apply({std::uint32_t(j), step, stream_lo_, stream_hi_}, key_);
            const double u1 = to_unit(r[0], r[1]);
            const double u2 = to_unit(r[2], r[3]);
            const double rad = std::sqrt(-2.0 * std::log(u1));
            const double ang = 2.0 * std::numbers::pi * u2;
            out(2 * j, rad * std::cos(ang));
            if (2 * j + 1 < count)
                out(2 * j + 1, rad * std::sin(ang));
        }
    }

    // Uniform in (0, 1] from 53 random bits.
    static double to_unit(std::uint32_t hi, std::uint32_t lo)
    {
        const std::uint64_t bits = ((std::uint64_t(hi) << 32) | lo) >> 11;
        return (double(bits) + 1.0) * 0x1.0p-53;
    }

private:
    Philox4x32::Key key_;
    std::uint32_t stream_lo_, stream_hi_;
};

} // namespace hvroc
