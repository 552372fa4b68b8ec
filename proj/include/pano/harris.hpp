#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "pano/error.hpp"
#include "pano/gradient.hpp"
#include "pano/parallel.hpp"

namespace pano {

// Harris response per pixel. Responses are exact 64-bit integers computed
// from the Sobel-scaled gradients, so maps are bit-identical across runs
// and platforms. The border band (structure-tensor radius + derivative
// radius) is exactly zero.
struct ResponseMap {
    int width = 0;
    int height = 0;
    int border = 0;
    std::vector<int64_t> r;

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

struct Corner {
    int x = 0;
    int y = 0;
    int64_t response = 0;

    bool operator==(const Corner&) const = default;
};

// R = det(M) - k trace(M)^2 with M the box-filtered structure tensor
// [Sum Ix^2, Sum IxIy; Sum IxIy, Sum Iy^2]. k is applied as a reduced
// rational num/den (truncating division) to keep the arithmetic integral;
// k = 0.04 becomes exactly 1/25.
inline ResponseMap corner_response(const GradientField& grads, int window = 5,
                                   double k = 0.04) {
    if (window != 3 && window != 5 && window != 7)
        throw Error(ErrorCode::Usage, "corner_response: window must be 3, 5 or 7");
    if (k < 0.04 || k > 0.06)
        throw Error(ErrorCode::Usage, "corner_response: k must lie in [0.04, 0.06]");
    const int w = grads.width, h = grads.height;
    const int band = window / 2 + 1;  // tensor radius + derivative radius
    if (w < 2 * band + 1 || h < 2 * band + 1)
        throw Error(ErrorCode::ImageTooSmall, "corner_response: image smaller than window support");

    int64_t num = std::llround(k * 10000.0), den = 10000;
    const int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;

    // Summed-area tables of the gradient products, one extra row/column of zeros.
    const size_t sw = static_cast<size_t>(w) + 1;
    std::vector<int64_t> sxx(sw * (h + 1), 0), syy(sw * (h + 1), 0), sxy(sw * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        int64_t rxx = 0, ryy = 0, rxy = 0;
        for (int x = 0; x < w; ++x) {
            const size_t i = grads.idx(x, y);
            const int64_t gx = grads.ix[i], gy = grads.iy[i];
            rxx += gx * gx;
            ryy += gy * gy;
            rxy += gx * gy;
            const size_t o = (static_cast<size_t>(y) + 1) * sw + x + 1;
            sxx[o] = sxx[o - sw] + rxx;
            syy[o] = syy[o - sw] + ryy;
            sxy[o] = sxy[o - sw] + rxy;
        }
    }
    auto box = [&](const std::vector<int64_t>& s, int x0, int y0, int x1, int y1) {
        return s[static_cast<size_t>(y1 + 1) * sw + x1 + 1] -
               s[static_cast<size_t>(y0) * sw + x1 + 1] -
               s[static_cast<size_t>(y1 + 1) * sw + x0] + s[static_cast<size_t>(y0) * sw + x0];
    };

    ResponseMap resp;
    resp.width = w;
    resp.height = h;
    resp.border = band;
    resp.r.assign(static_cast<size_t>(w) * h, 0);

    const int rad = window / 2;
    parallel_for(band, h - band, [&](int64_t y0, int64_t y1) {
        for (int y = static_cast<int>(y0); y < y1; ++y) {
            for (int x = band; x < w - band; ++x) {
                const int64_t a = box(sxx, x - rad, y - rad, x + rad, y + rad);
                const int64_t b = box(syy, x - rad, y - rad, x + rad, y + rad);
                const int64_t c = box(sxy, x - rad, y - rad, x + rad, y + rad);
                const __int128 det = static_cast<__int128>(a) * b - static_cast<__int128>(c) * c;
                const __int128 tr = a + b;
                const __int128 kterm = static_cast<__int128>(num) * tr * tr / den;
                resp.r[resp.idx(x, y)] = static_cast<int64_t>(det - kterm);
            }
        }
    });
    return resp;
}

// Keeps pixels with r >= threshold that are strictly greater than every
// neighbor in the (2 radius + 1)^2 window; equal-valued neighbors are
// resolved in favor of the lexicographically smallest (y, x). Output is
// sorted by descending response, ties by (y, x) scan order.
inline std::vector<Corner> non_max_suppress(const ResponseMap& resp, int64_t threshold,
                                            int radius = 3) {
    if (radius < 1) throw Error(ErrorCode::Usage, "non_max_suppress: radius must be >= 1");
    std::vector<Corner> out;
    const int w = resp.width, h = resp.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int64_t v = resp.r[resp.idx(x, y)];
            if (v < threshold) continue;
            bool is_max = true;
            const int ylo = std::max(0, y - radius), yhi = std::min(h - 1, y + radius);
            const int xlo = std::max(0, x - radius), xhi = std::min(w - 1, x + radius);
            for (int ny = ylo; ny <= yhi && is_max; ++ny) {
                for (int nx = xlo; nx <= xhi; ++nx) {
                    if (nx == x && ny == y) continue;
                    const int64_t nv = resp.r[resp.idx(nx, ny)];
                    if (nv > v || (nv == v && (ny < y || (ny == y && nx < x)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) out.push_back({x, y, v});
        }
    }
    std::sort(out.begin(), out.end(), [](const Corner& a, const Corner& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    return out;
}

// Threshold T = alpha * max(R), raised to the response of the
// target_count-th strongest local maximum when more than target_count
// peaks clear the alpha cut. The cap itself is enforced by extraction
// order (detect_corners truncates), since equal responses can tie at T.
inline int64_t adaptive_threshold(const ResponseMap& resp, int target_count, double alpha,
                                  int radius = 3) {
    if (target_count < 1) throw Error(ErrorCode::Usage, "adaptive_threshold: target_count >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::Usage, "adaptive_threshold: alpha must lie in (0, 1)");
    int64_t max_r = 0;
    for (int64_t v : resp.r) max_r = std::max(max_r, v);
    if (max_r <= 0)
        throw Error(ErrorCode::EmptyResponse, "flat or edge-only response map, no features");
    int64_t t = std::llround(alpha * static_cast<double>(max_r));
    if (t < 1) t = 1;  // a corner must have a strictly positive response
    const std::vector<Corner> peaks = non_max_suppress(resp, t, radius);
    if (peaks.size() > static_cast<size_t>(target_count))
        t = peaks[static_cast<size_t>(target_count) - 1].response;
    return t;
}

// Full extraction: adaptive threshold, NMS, then rank truncation so at most
// target_count corners survive (ties at the cutoff resolved by scan order).
inline std::vector<Corner> detect_corners(const ResponseMap& resp, int target_count = 512,
                                          double alpha = 0.01, int radius = 3) {
    const int64_t t = adaptive_threshold(resp, target_count, alpha, radius);
    std::vector<Corner> corners = non_max_suppress(resp, t, radius);
    if (corners.size() > static_cast<size_t>(target_count))
        corners.resize(static_cast<size_t>(target_count));
    return corners;
}

}  // namespace pano
