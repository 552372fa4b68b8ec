#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "pano/descriptor.hpp"
#include "pano/error.hpp"
#include "pano/parallel.hpp"
#include "pano/rng.hpp"

namespace pano {

struct Match {
    int index_a = 0;
    int index_b = 0;
    double distance = 0.0;  // L2 distance between descriptor vectors
    double ratio = 0.0;     // best / second-best; 0 when no second neighbor
};

// Inter-frame alignment mapping frame-B coordinates into frame A:
// p_a = R(theta) p_b + (dx, dy).
struct FrameTransform {
    double dx = 0.0;
    double dy = 0.0;
    double theta_deg = 0.0;
    int inliers = 0;
    double residual_rms = 0.0;
    uint64_t seed = 0;
};

struct XRange {
    int lo = 0;  // inclusive
    int hi = 0;  // exclusive

    bool contains(int x) const { return x >= lo && x < hi; }
};

enum class PanDirection { LeftToRight, RightToLeft };

// Half-image overlap restriction: for a left-to-right pan only the right
// half of frame A can overlap the left half of frame B, so only corners in
// those ranges participate in matching.
inline std::pair<XRange, XRange> overlap_regions(int width, PanDirection direction) {
    if (width < 32) throw Error(ErrorCode::Usage, "overlap_regions: width must be >= 32");
    const int mid = width / 2;
    if (direction == PanDirection::LeftToRight)
        return {XRange{mid, width}, XRange{0, mid}};
    return {XRange{0, mid}, XRange{mid, width}};
}

inline double descriptor_distance2(const Descriptor& a, const Descriptor& b) {
    double d2 = 0.0;
    for (int k = 0; k < kDescDim; ++k) {
        const double d = static_cast<double>(a.vec[k]) - static_cast<double>(b.vec[k]);
        d2 += d * d;
    }
    return d2;
}

// Exhaustive nearest-neighbor matching with the Lowe ratio test and a
// mutual cross-check. The ratio test is applied in both directions so the
// accepted set is symmetric: (i,j) in matches(a,b) iff (j,i) in matches(b,a).
// Result sorted by ascending ratio (forward a->b ratio is the one stored).
inline std::vector<Match> match_descriptors(const std::vector<Descriptor>& a,
                                            const std::vector<Descriptor>& b,
                                            double ratio_max = 0.8) {
    if (!(ratio_max > 0.0 && ratio_max < 1.0))
        throw Error(ErrorCode::Usage, "match_descriptors: ratio_max must lie in (0, 1)");
    std::vector<Match> out;
    const size_t na = a.size(), nb = b.size();
    if (na == 0 || nb == 0) return out;

    std::vector<double> d2(na * nb);
    parallel_for(0, static_cast<int64_t>(na), [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i)
            for (size_t j = 0; j < nb; ++j)
                d2[static_cast<size_t>(i) * nb + j] = descriptor_distance2(a[i], b[j]);
    });

    constexpr double kInf = std::numeric_limits<double>::infinity();
    // nearest / second-nearest per side; ties resolved toward the smaller index
    auto scan = [](size_t n_rows, size_t n_cols, auto&& at, std::vector<int>& nn,
                   std::vector<double>& ratio) {
        for (size_t i = 0; i < n_rows; ++i) {
            int best = -1;
            double d1 = kInf, d_second = kInf;
            for (size_t j = 0; j < n_cols; ++j) {
                const double d = at(i, j);
                if (d < d1) {
                    d_second = d1;
                    d1 = d;
                    best = static_cast<int>(j);
                } else if (d < d_second) {
                    d_second = d;
                }
            }
            nn[i] = best;
            if (n_cols < 2)
                ratio[i] = 0.0;
            else if (d_second == 0.0)
                ratio[i] = 1.0;  // exact duplicates: fully ambiguous
            else
                ratio[i] = std::sqrt(d1 / d_second);
        }
    };

    std::vector<int> fwd(na), rev(nb);
    std::vector<double> ratio_a(na), ratio_b(nb);
    scan(na, nb, [&](size_t i, size_t j) { return d2[i * nb + j]; }, fwd, ratio_a);
    scan(nb, na, [&](size_t j, size_t i) { return d2[i * nb + j]; }, rev, ratio_b);

    for (size_t i = 0; i < na; ++i) {
        const int j = fwd[i];
        if (j < 0) continue;
        if (rev[static_cast<size_t>(j)] != static_cast<int>(i)) continue;
        if (ratio_a[i] > ratio_max || ratio_b[static_cast<size_t>(j)] > ratio_max) continue;
        out.push_back({static_cast<int>(i), j, std::sqrt(d2[i * nb + j]), ratio_a[i]});
    }
    std::sort(out.begin(), out.end(), [](const Match& x, const Match& y) {
        if (x.ratio != y.ratio) return x.ratio < y.ratio;
        if (x.index_a != y.index_a) return x.index_a < y.index_a;
        return x.index_b < y.index_b;
    });
    return out;
}

struct Pt {
    double x = 0.0;
    double y = 0.0;
};

enum class MotionModel { Translation, Similarity };

struct RansacParams {
    int iterations = 200;
    double inlier_tol = 2.0;  // pixels
    uint64_t seed = 0;
};

constexpr double kMaxThetaDeg = 5.0;  // operating envelope for per-pair rotation

namespace detail {

inline void apply_rigid(double cos_t, double sin_t, double dx, double dy, const Pt& p,
                        double& ox, double& oy) {
    ox = cos_t * p.x - sin_t * p.y + dx;
    oy = sin_t * p.x + cos_t * p.y + dy;
}

}  // namespace detail

// Robust consensus estimation of the inter-frame transform from matched
// corner positions. Minimal sample: 1 match for translation, 2 for
// similarity (rotation + translation, scale fixed at 1). The largest inlier
// set is refit by least squares. Per-iteration RNG streams are derived from
// the seed, so the result is deterministic and iteration-order independent.
inline FrameTransform estimate_transform(const std::vector<Match>& matches,
                                         const std::vector<Pt>& pts_a,
                                         const std::vector<Pt>& pts_b,
                                         MotionModel model = MotionModel::Translation,
                                         const RansacParams& params = {}) {
    const size_t n = matches.size();
    if (n < 4)
        throw Error(ErrorCode::InsufficientMatches,
                    "estimate_transform: need at least 4 matches");

    const double tol2 = params.inlier_tol * params.inlier_tol;
    auto count_inliers = [&](double cos_t, double sin_t, double dx, double dy,
                             std::vector<int>* keep) {
        int count = 0;
        for (size_t m = 0; m < n; ++m) {
            const Pt& pa = pts_a[static_cast<size_t>(matches[m].index_a)];
            const Pt& pb = pts_b[static_cast<size_t>(matches[m].index_b)];
            double px, py;
            detail::apply_rigid(cos_t, sin_t, dx, dy, pb, px, py);
            const double ex = pa.x - px, ey = pa.y - py;
            if (ex * ex + ey * ey <= tol2) {
                ++count;
                if (keep) keep->push_back(static_cast<int>(m));
            }
        }
        return count;
    };

    int best_count = 0;
    double best_cos = 1.0, best_sin = 0.0, best_dx = 0.0, best_dy = 0.0;
    for (int it = 0; it < params.iterations; ++it) {
        Rng rng = Rng::stream(params.seed, static_cast<uint64_t>(it));
        double cos_t = 1.0, sin_t = 0.0, dx, dy;
        if (model == MotionModel::Translation) {
            const Match& m = matches[rng.next_index(n)];
            dx = pts_a[m.index_a].x - pts_b[m.index_b].x;
            dy = pts_a[m.index_a].y - pts_b[m.index_b].y;
        } else {
            const size_t i1 = rng.next_index(n);
            size_t i2 = rng.next_index(n);
            if (i2 == i1) i2 = (i2 + 1) % n;
            const Pt& a1 = pts_a[matches[i1].index_a];
            const Pt& a2 = pts_a[matches[i2].index_a];
            const Pt& b1 = pts_b[matches[i1].index_b];
            const Pt& b2 = pts_b[matches[i2].index_b];
            const double vax = a2.x - a1.x, vay = a2.y - a1.y;
            const double vbx = b2.x - b1.x, vby = b2.y - b1.y;
            const double cross = vbx * vay - vby * vax;
            const double dot = vbx * vax + vby * vay;
            if (std::abs(dot) < 1e-12 && std::abs(cross) < 1e-12) continue;
            const double theta = std::atan2(cross, dot);
            if (std::abs(theta) > kMaxThetaDeg * M_PI / 180.0) continue;
            cos_t = std::cos(theta);
            sin_t = std::sin(theta);
            dx = a1.x - (cos_t * b1.x - sin_t * b1.y);
            dy = a1.y - (sin_t * b1.x + cos_t * b1.y);
        }
        const int count = count_inliers(cos_t, sin_t, dx, dy, nullptr);
        if (count > best_count) {
            best_count = count;
            best_cos = cos_t;
            best_sin = sin_t;
            best_dx = dx;
            best_dy = dy;
        }
    }
    if (best_count < 4)
        throw Error(ErrorCode::NoConsensus, "estimate_transform: largest inlier set below 4");

    std::vector<int> support;
    support.reserve(static_cast<size_t>(best_count));
    count_inliers(best_cos, best_sin, best_dx, best_dy, &support);

    // Least-squares refit on the support set.
    FrameTransform t;
    t.seed = params.seed;
    t.inliers = static_cast<int>(support.size());
    double cos_f = 1.0, sin_f = 0.0;
    if (model == MotionModel::Translation) {
        double sx = 0.0, sy = 0.0;
        for (int m : support) {
            sx += pts_a[matches[m].index_a].x - pts_b[matches[m].index_b].x;
            sy += pts_a[matches[m].index_a].y - pts_b[matches[m].index_b].y;
        }
        t.dx = sx / support.size();
        t.dy = sy / support.size();
        t.theta_deg = 0.0;
    } else {
        double cax = 0, cay = 0, cbx = 0, cby = 0;
        for (int m : support) {
            cax += pts_a[matches[m].index_a].x;
            cay += pts_a[matches[m].index_a].y;
            cbx += pts_b[matches[m].index_b].x;
            cby += pts_b[matches[m].index_b].y;
        }
        const double inv = 1.0 / support.size();
        cax *= inv; cay *= inv; cbx *= inv; cby *= inv;
        double s_dot = 0.0, s_cross = 0.0;
        for (int m : support) {
            const double ax = pts_a[matches[m].index_a].x - cax;
            const double ay = pts_a[matches[m].index_a].y - cay;
            const double bx = pts_b[matches[m].index_b].x - cbx;
            const double by = pts_b[matches[m].index_b].y - cby;
            s_dot += bx * ax + by * ay;
            s_cross += bx * ay - by * ax;
        }
        const double theta = std::atan2(s_cross, s_dot);
        if (std::abs(theta) > kMaxThetaDeg * M_PI / 180.0)
            throw Error(ErrorCode::NoConsensus,
                        "estimate_transform: refit rotation outside operating envelope");
        cos_f = std::cos(theta);
        sin_f = std::sin(theta);
        t.theta_deg = theta * 180.0 / M_PI;
        t.dx = cax - (cos_f * cbx - sin_f * cby);
        t.dy = cay - (sin_f * cbx + cos_f * cby);
    }

    double err2 = 0.0;
    for (int m : support) {
        const Pt& pa = pts_a[matches[m].index_a];
        const Pt& pb = pts_b[matches[m].index_b];
        double px, py;
        detail::apply_rigid(cos_f, sin_f, t.dx, t.dy, pb, px, py);
        err2 += (pa.x - px) * (pa.x - px) + (pa.y - py) * (pa.y - py);
    }
    t.residual_rms = std::sqrt(err2 / support.size());
    return t;
}

}  // namespace pano
