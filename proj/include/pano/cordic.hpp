#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <vector>

#include "pano/error.hpp"

namespace pano {

// Signed Q-format fixed-point value. Arithmetic requires matching frac_bits.
struct Fixed {
    int64_t raw = 0;
    int frac_bits = 16;

    static Fixed from_raw(int64_t r, int frac = 16) { return Fixed{r, frac}; }
    static Fixed from_double(double v, int frac = 16) {
        return Fixed{static_cast<int64_t>(std::llround(v * std::ldexp(1.0, frac))), frac};
    }
    static Fixed from_int(int64_t v, int frac = 16) { return Fixed{v << frac, frac}; }

    double to_double() const { return std::ldexp(static_cast<double>(raw), -frac_bits); }

    Fixed operator+(Fixed o) const {
        assert(frac_bits == o.frac_bits);
        return Fixed{raw + o.raw, frac_bits};
    }
    Fixed operator-(Fixed o) const {
        assert(frac_bits == o.frac_bits);
        return Fixed{raw - o.raw, frac_bits};
    }
    Fixed operator-() const { return Fixed{-raw, frac_bits}; }
    bool operator==(const Fixed& o) const = default;
};

struct CordicResult {
    Fixed magnitude;  // >= 0, same frac_bits as the inputs
    Fixed angle_deg;  // Q16.16 degrees in [0, 360)
};

namespace detail {

constexpr int kAngleFrac = 32;  // internal angle accumulator: degrees, Q32 fraction
constexpr int kNormBit = 44;    // prescale target: max(|x|,|y|) lands in [2^44, 2^45)
constexpr int kMaxIterations = 30;

// arctan(2^-i) in degrees, Q32.
inline const std::array<int64_t, kMaxIterations>& cordic_atan_table() {
    static const std::array<int64_t, kMaxIterations> table = [] {
        std::array<int64_t, kMaxIterations> t{};
        for (int i = 0; i < kMaxIterations; ++i) {
            double deg = std::atan(std::ldexp(1.0, -i)) * 180.0 / M_PI;
            t[i] = static_cast<int64_t>(std::llround(deg * std::ldexp(1.0, kAngleFrac)));
        }
        return t;
    }();
    return table;
}

// 2^62 / K_n where K_n = prod_{i<n} sqrt(1 + 2^-2i), indexed by iteration count.
inline const std::array<int64_t, kMaxIterations + 1>& cordic_inv_gain_q62() {
    static const std::array<int64_t, kMaxIterations + 1> table = [] {
        std::array<int64_t, kMaxIterations + 1> t{};
        double k = 1.0;
        t[0] = 0;
        for (int n = 1; n <= kMaxIterations; ++n) {
            k *= std::sqrt(1.0 + std::ldexp(1.0, -2 * (n - 1)));
            t[n] = static_cast<int64_t>(std::llround(std::ldexp(1.0, 62) / k));
        }
        return t;
    }();
    return table;
}

inline int64_t round_shift_right(__int128 v, int s) {
    if (s <= 0) return static_cast<int64_t>(v << -s);
    __int128 half = static_cast<__int128>(1) << (s - 1);
    return static_cast<int64_t>((v + half) >> s);
}

}  // namespace detail

// Vectoring-mode CORDIC: rotates (x, y) onto the positive x axis with
// shift-add micro-rotations, yielding magnitude ~ sqrt(x^2+y^2) and angle
// ~ atan2(y, x) in [0, 360). The gain K is compensated by one multiplication
// with a precomputed 1/K constant; everything else is add/sub/shift.
//
// Inputs are block-normalized (a pure shift) so precision is independent of
// operand scale: halving both inputs changes only the final shift-back, and
// the angle comes out bit-identical. Axis-aligned inputs bypass the loop and
// return exact results. (0, 0) returns magnitude 0, angle 0 by convention.
inline CordicResult cordic_vectoring(Fixed x, Fixed y, int iterations) {
    if (x.frac_bits != y.frac_bits)
        throw Error(ErrorCode::Usage, "cordic_vectoring: mismatched frac_bits");
    if (iterations < 1 || iterations > detail::kMaxIterations)
        throw Error(ErrorCode::Usage, "cordic_vectoring: iterations out of [1, 30]");

    const int frac = x.frac_bits;
    int64_t xr = x.raw, yr = y.raw;

    auto deg_fixed = [](int64_t deg) { return Fixed::from_raw(deg << 16, 16); };

    if (xr == 0 && yr == 0) return {Fixed::from_raw(0, frac), deg_fixed(0)};
    if (yr == 0) {
        return {Fixed::from_raw(xr < 0 ? -xr : xr, frac), deg_fixed(xr < 0 ? 180 : 0)};
    }
    if (xr == 0) {
        return {Fixed::from_raw(yr < 0 ? -yr : yr, frac), deg_fixed(yr < 0 ? 270 : 90)};
    }

    // Map to the right half-plane; the result angle gets the 180 degrees back.
    int64_t base_deg = 0;
    if (xr < 0) {
        xr = -xr;
        yr = -yr;
        base_deg = 180;
    }

    // Block normalization: shift so max(|x|,|y|) sits at bit kNormBit.
    const uint64_t m = static_cast<uint64_t>(std::max(xr < 0 ? -xr : xr, yr < 0 ? -yr : yr));
    const int lead = 63 - std::countl_zero(m);
    const int s = detail::kNormBit - lead;
    if (s >= 0) {
        xr <<= s;
        yr <<= s;
    } else {
        xr >>= -s;
        yr >>= -s;
    }

    const auto& atan_q32 = detail::cordic_atan_table();
    int64_t z = 0;
    for (int i = 0; i < iterations; ++i) {
        const int64_t xs = xr >> i;
        const int64_t ys = yr >> i;
        if (yr >= 0) {
            xr += ys;
            yr -= xs;
            z += atan_q32[i];
        } else {
            xr -= ys;
            yr += xs;
            z -= atan_q32[i];
        }
    }

    // Gain compensation and shift back to the caller's scale.
    const __int128 prod =
        static_cast<__int128>(xr) * detail::cordic_inv_gain_q62()[iterations];
    const int64_t mag_raw = detail::round_shift_right(prod, 62 + s);

    int64_t angle_q32 = (base_deg << detail::kAngleFrac) + z;
    const int64_t full_turn = static_cast<int64_t>(360) << detail::kAngleFrac;
    angle_q32 %= full_turn;
    if (angle_q32 < 0) angle_q32 += full_turn;
    int64_t angle_raw = detail::round_shift_right(angle_q32, detail::kAngleFrac - 16);
    if (angle_raw >= (static_cast<int64_t>(360) << 16)) angle_raw = 0;

    return {Fixed::from_raw(mag_raw, frac), Fixed::from_raw(angle_raw, 16)};
}

// ---------------------------------------------------------------------------
// Orientation quantization: which of 36 ten-degree bins contains atan2(y, x).
// Implemented with exact integer half-plane tests against fixed tangent
// constants, so the bin is a pure function of the gradient pair and is stable
// under any positive rescaling of (x, y). (0, 0) maps to bin 0.
// ---------------------------------------------------------------------------

inline int orientation_bin36(int64_t gx, int64_t gy) {
    if (gx == 0 && gy == 0) return 0;
    // Rotate by -90 degrees until the vector lies in [0, 90).
    int quadrant = 0;
    while (!(gx > 0 && gy >= 0)) {
        const int64_t t = gx;
        gx = gy;
        gy = -t;
        ++quadrant;
    }
    // tan(10k degrees) in Q40, k = 1..8.
    static const std::array<int64_t, 9> tan_q40 = [] {
        std::array<int64_t, 9> t{};
        for (int k = 1; k <= 8; ++k)
            t[k] = static_cast<int64_t>(
                std::llround(std::tan(k * 10.0 * M_PI / 180.0) * std::ldexp(1.0, 40)));
        return t;
    }();
    int bin = 0;
    const __int128 lhs = static_cast<__int128>(gy) << 40;
    for (int k = 1; k <= 8; ++k) {
        if (lhs >= static_cast<__int128>(tan_q40[k]) * gx) bin = k;
    }
    return quadrant * 9 + bin;
}

// ---------------------------------------------------------------------------
// Trigonometric lookup table at bin-center angles, Q16.16.
// ---------------------------------------------------------------------------

struct TrigEntry {
    Fixed cos_v;
    Fixed sin_v;
};

using TrigLut = std::vector<TrigEntry>;

// Entry i holds cos/sin of the bin-center angle (i + 0.5) * (360 / bins).
inline TrigLut build_trig_lut(int bins) {
    if (bins < 1) throw Error(ErrorCode::Usage, "build_trig_lut: bins must be >= 1");
    TrigLut lut(static_cast<size_t>(bins));
    for (int i = 0; i < bins; ++i) {
        const double deg = (i + 0.5) * (360.0 / bins);
        const double rad = deg * M_PI / 180.0;
        lut[i].cos_v = Fixed::from_double(std::cos(rad), 16);
        lut[i].sin_v = Fixed::from_double(std::sin(rad), 16);
    }
    return lut;
}

// Text dump for hardware-comparison audits: one "index cos sin" line per entry.
inline void dump_trig_lut(const TrigLut& lut, std::ostream& out) {
    char line[64];
    for (size_t i = 0; i < lut.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu %.6f %.6f\n", i, lut[i].cos_v.to_double(),
                      lut[i].sin_v.to_double());
        out << line;
    }
}

}  // namespace pano
