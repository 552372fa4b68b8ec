#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pano/cordic.hpp"
#include "pano/error.hpp"
#include "pano/gradient.hpp"
#include "pano/harris.hpp"
#include "pano/parallel.hpp"

namespace pano {

constexpr int kDescSubregions = 4;      // 4x4 sub-region grid
constexpr int kDescSubregionSize = 3;   // each sub-region is 3x3 samples
constexpr int kDescSupport = kDescSubregions * kDescSubregionSize;  // 12x12 window
constexpr int kDescOriBins = 8;         // orientation bins per sub-region, 45 degrees
constexpr int kDescDim = kDescSubregions * kDescSubregions * kDescOriBins;  // 128
constexpr int kDescBorderMargin = 10;   // rotated 12x12 support, rounded up with margin
constexpr int kMainOriBinsFine = 36;    // 10-degree histogram columns
constexpr int kMainOriBinsFolded = 18;  // pairwise 36 -> 18 reduction, 20 degrees
constexpr float kDescClamp = 0.2f;      // illumination clamp before renormalization

struct Descriptor {
    Corner corner;
    double main_angle_deg = 0.0;        // multiple of the folded bin spacing
    std::array<float, kDescDim> vec{};  // L2-normalized, all entries >= 0
};

// Dominant gradient direction at a corner: a 36-bin histogram over the 3x3
// neighborhood, magnitude-weighted with no Gaussian window, folded pairwise
// into 18 bins of 20 degrees. Returns the winning bin's center angle; ties
// go to the smaller angle.
inline double main_orientation(const GradientField& grads, const Corner& c) {
    if (c.x < 1 || c.y < 1 || c.x >= grads.width - 1 || c.y >= grads.height - 1)
        throw Error(ErrorCode::TooCloseToBorder, "main_orientation: 3x3 window out of bounds");
    int64_t hist[kMainOriBinsFine] = {};
    bool any = false;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const size_t i = grads.idx(c.x + dx, c.y + dy);
            const int32_t m = grads.mag[i];
            if (m == 0) continue;
            any = true;
            hist[grads.dir[i]] += m;
        }
    }
    if (!any)
        throw Error(ErrorCode::ZeroGradientNeighborhood,
                    "main_orientation: all nine magnitudes are zero");
    int best = 0;
    int64_t best_mass = -1;
    for (int j = 0; j < kMainOriBinsFolded; ++j) {
        const int64_t mass = hist[2 * j] + hist[2 * j + 1];
        if (mass > best_mass) {
            best_mass = mass;
            best = j;
        }
    }
    return best * (360.0 / kMainOriBinsFolded) + (180.0 / kMainOriBinsFolded);
}

// 4x4 x 8-bin descriptor over a 12x12 support window sampled in a frame
// rotated by the main orientation (cos_t/sin_t). Gradients are looked up
// nearest-neighbor; each sample scatters its magnitude to the 1-2
// neighboring sub-region rows/columns and orientation bins with bilinear
// weights d^k (1-d)^(1-k), k in {0,1}. The vector is L2-normalized, clamped
// at 0.2 per element, and renormalized.
inline Descriptor build_descriptor(const GradientField& grads, const Corner& c,
                                   double main_angle_deg, double cos_t, double sin_t) {
    const int w = grads.width, h = grads.height;
    if (c.x < kDescBorderMargin || c.y < kDescBorderMargin || c.x >= w - kDescBorderMargin ||
        c.y >= h - kDescBorderMargin)
        throw Error(ErrorCode::TooCloseToBorder, "build_descriptor: support window out of bounds");

    double hist[kDescSubregions][kDescSubregions][kDescOriBins] = {};
    const double half = kDescSupport / 2.0 - 0.5;  // 5.5: grid offsets are half-integers

    for (int j = 0; j < kDescSupport; ++j) {
        const double v = j - half;
        for (int i = 0; i < kDescSupport; ++i) {
            const double u = i - half;
            // Sample position in image coordinates, rotated by the main angle.
            const double px = c.x + cos_t * u - sin_t * v;
            const double py = c.y + sin_t * u + cos_t * v;
            const int qx = static_cast<int>(std::llround(px));
            const int qy = static_cast<int>(std::llround(py));
            if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
            const size_t qi = grads.idx(qx, qy);
            const int32_t mraw = grads.mag[qi];
            if (mraw == 0) continue;

            const double phi = grads.dir[qi] * 10.0 + 5.0;  // fine-bin center angle
            double rel = std::fmod(phi - main_angle_deg, 360.0);
            if (rel < 0) rel += 360.0;

            const double rbin = (j + 0.5) / kDescSubregionSize - 0.5;
            const double cbin = (i + 0.5) / kDescSubregionSize - 0.5;
            const double obin = rel / (360.0 / kDescOriBins);
            const int r0 = static_cast<int>(std::floor(rbin));
            const int c0 = static_cast<int>(std::floor(cbin));
            const int o0 = static_cast<int>(std::floor(obin));
            const double dr = rbin - r0, dc = cbin - c0, dob = obin - o0;

            const double m = static_cast<double>(mraw);
            for (int a = 0; a <= 1; ++a) {
                const int row = r0 + a;
                if (row < 0 || row >= kDescSubregions) continue;
                const double wr = a ? dr : 1.0 - dr;
                for (int b = 0; b <= 1; ++b) {
                    const int col = c0 + b;
                    if (col < 0 || col >= kDescSubregions) continue;
                    const double wc = b ? dc : 1.0 - dc;
                    for (int e = 0; e <= 1; ++e) {
                        const int ob = (o0 + e) % kDescOriBins;
                        const double wo = e ? dob : 1.0 - dob;
                        hist[row][col][ob] += m * wr * wc * wo;
                    }
                }
            }
        }
    }

    double raw[kDescDim];
    double norm2 = 0.0;
    int k = 0;
    for (int r = 0; r < kDescSubregions; ++r)
        for (int cc = 0; cc < kDescSubregions; ++cc)
            for (int o = 0; o < kDescOriBins; ++o) {
                raw[k] = hist[r][cc][o];
                norm2 += raw[k] * raw[k];
                ++k;
            }
    if (norm2 <= 0.0)
        throw Error(ErrorCode::ZeroDescriptor, "build_descriptor: no gradient contributions");

    // L2 normalize, clamp, renormalize.
    double inv = 1.0 / std::sqrt(norm2);
    norm2 = 0.0;
    for (double& x : raw) {
        x *= inv;
        if (x > kDescClamp) x = kDescClamp;
        norm2 += x * x;
    }
    inv = 1.0 / std::sqrt(norm2);

    Descriptor d;
    d.corner = c;
    d.main_angle_deg = main_angle_deg;
    for (int idx = 0; idx < kDescDim; ++idx)
        d.vec[idx] = static_cast<float>(raw[idx] * inv);
    return d;
}

// Convenience overload: rotation trig resolved through the 18-entry CORDIC
// LUT when the angle is a folded-bin center, exact trig otherwise.
inline Descriptor build_descriptor(const GradientField& grads, const Corner& c,
                                   double main_angle_deg) {
    static const TrigLut lut18 = build_trig_lut(kMainOriBinsFolded);
    const double spacing = 360.0 / kMainOriBinsFolded;
    const double pos = (main_angle_deg - spacing / 2.0) / spacing;
    const long j = std::lround(pos);
    if (j >= 0 && j < kMainOriBinsFolded && std::abs(pos - j) < 1e-9) {
        return build_descriptor(grads, c, main_angle_deg, lut18[j].cos_v.to_double(),
                                lut18[j].sin_v.to_double());
    }
    const double rad = main_angle_deg * M_PI / 180.0;
    return build_descriptor(grads, c, main_angle_deg, std::cos(rad), std::sin(rad));
}

struct DescribeStats {
    uint32_t rejected_border = 0;
    uint32_t rejected_zero_gradient = 0;
    uint32_t rejected_zero_descriptor = 0;

    uint32_t total_rejected() const {
        return rejected_border + rejected_zero_gradient + rejected_zero_descriptor;
    }
};

struct DescribeResult {
    std::vector<Descriptor> descriptors;  // survivors, in input corner order
    DescribeStats stats;
};

// Batch descriptor pass over a corner list. Corners failing the border or
// gradient checks are dropped and counted; survivors keep their input order.
inline DescribeResult describe_all(const GradientField& grads,
                                   const std::vector<Corner>& corners) {
    DescribeResult out;
    const size_t n = corners.size();
    std::vector<Descriptor> slots(n);
    // 0 = ok, 1 = border, 2 = zero gradient, 3 = zero descriptor
    std::vector<uint8_t> state(n, 0);

    parallel_for(0, static_cast<int64_t>(n), [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) {
            const Corner& c = corners[static_cast<size_t>(i)];
            if (c.x < kDescBorderMargin || c.y < kDescBorderMargin ||
                c.x >= grads.width - kDescBorderMargin ||
                c.y >= grads.height - kDescBorderMargin) {
                state[i] = 1;
                continue;
            }
            try {
                const double angle = main_orientation(grads, c);
                slots[i] = build_descriptor(grads, c, angle);
            } catch (const Error& e) {
                state[i] = e.code() == ErrorCode::ZeroGradientNeighborhood ? 2 : 3;
            }
        }
    });

    for (size_t i = 0; i < n; ++i) {
        switch (state[i]) {
            case 0: out.descriptors.push_back(std::move(slots[i])); break;
            case 1: ++out.stats.rejected_border; break;
            case 2: ++out.stats.rejected_zero_gradient; break;
            default: ++out.stats.rejected_zero_descriptor; break;
        }
    }
    return out;
}

}  // namespace pano
