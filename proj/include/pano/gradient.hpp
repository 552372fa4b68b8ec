#pragma once

#include <cstdint>
#include <vector>

#include "pano/cordic.hpp"
#include "pano/error.hpp"
#include "pano/image.hpp"
#include "pano/parallel.hpp"

namespace pano {

// Per-pixel signed Sobel derivatives plus the CORDIC-derived magnitude and
// quantized orientation. Computed once per frame; Harris and the descriptor
// both read from here. Border pixels (1-px band) are ix = iy = mag = 0, dir 0.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<int16_t> ix;   // Sobel-scaled, range [-1020, 1020]
    std::vector<int16_t> iy;
    std::vector<int32_t> mag;  // Q16.16, >= 0
    std::vector<uint8_t> dir;  // orientation bin in [0, 36), 10 degrees per bin

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

// 3x3 Sobel derivatives, then vectoring CORDIC for the magnitude. The
// orientation bin comes from exact integer half-plane tests so it is stable
// under brightness rescaling of the source image.
inline GradientField compute_gradients(const GrayImage& img, int cordic_iters = 16) {
    if (img.width < 3 || img.height < 3)
        throw Error(ErrorCode::ImageTooSmall, "compute_gradients needs at least 3x3 pixels");
    if (static_cast<size_t>(img.width) * img.height != img.data.size())
        throw Error(ErrorCode::DimensionMismatch, "image data length != width * height");

    GradientField g;
    g.width = img.width;
    g.height = img.height;
    const size_t n = img.data.size();
    g.ix.assign(n, 0);
    g.iy.assign(n, 0);
    g.mag.assign(n, 0);
    g.dir.assign(n, 0);

    const int w = img.width;
    const uint8_t* p = img.data.data();

    parallel_for(1, img.height - 1, [&](int64_t y0, int64_t y1) {
        for (int y = static_cast<int>(y0); y < y1; ++y) {
            const uint8_t* rm = p + (y - 1) * w;
            const uint8_t* rc = p + y * w;
            const uint8_t* rp = p + (y + 1) * w;
            for (int x = 1; x < w - 1; ++x) {
                const int gx = (rm[x + 1] + 2 * rc[x + 1] + rp[x + 1]) -
                               (rm[x - 1] + 2 * rc[x - 1] + rp[x - 1]);
                const int gy = (rp[x - 1] + 2 * rp[x] + rp[x + 1]) -
                               (rm[x - 1] + 2 * rm[x] + rm[x + 1]);
                const size_t i = g.idx(x, y);
                g.ix[i] = static_cast<int16_t>(gx);
                g.iy[i] = static_cast<int16_t>(gy);
                if (gx == 0 && gy == 0) continue;
                const CordicResult r = cordic_vectoring(
                    Fixed::from_int(gx), Fixed::from_int(gy), cordic_iters);
                g.mag[i] = static_cast<int32_t>(r.magnitude.raw);
                g.dir[i] = static_cast<uint8_t>(orientation_bin36(gx, gy));
            }
        }
    });
    return g;
}

}  // namespace pano
