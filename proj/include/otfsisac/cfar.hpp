#pragma once

#include <vector>

#include "otfsisac/common.hpp"

namespace otfsisac {

/// Cell-averaging CFAR window geometry, as half-widths per dimension. The
/// defaults give 16 training and 2 guard cells per dimension.
struct CfarConfig {
    int train = 8;
    int guard = 1;

    void validate() const {
        require(train >= 1, "CFAR training half-width must be >= 1");
        require(guard >= 0, "CFAR guard half-width must be >= 0");
    }
};

struct CfarDetection {
    int row = 0;
    int col = 0;
    double value = 0.0;
    double threshold = 0.0;
};

struct CfarResult {
    std::vector<CfarDetection> detections;  ///< sorted by value, descending
    std::size_t exceed_count = 0;           ///< threshold crossings before peak gating
};

namespace detail {

/// Inclusive prefix sums for O(1) clipped box sums.
class IntegralImage {
public:
    explicit IntegralImage(const RMat& map)
        : rows_(static_cast<int>(map.rows())), cols_(static_cast<int>(map.cols())),
          sums_(rows_ + 1, cols_ + 1) {
        sums_.setZero();
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                sums_(r + 1, c + 1) =
                    map(r, c) + sums_(r, c + 1) + sums_(r + 1, c) - sums_(r, c);
    }

    /// Sum over the clipped box [r0, r1] x [c0, c1].
    double box(int r0, int r1, int c0, int c1) const {
        r0 = std::max(r0, 0);
        c0 = std::max(c0, 0);
        r1 = std::min(r1, rows_ - 1);
        c1 = std::min(c1, cols_ - 1);
        if (r0 > r1 || c0 > c1) return 0.0;
        return sums_(r1 + 1, c1 + 1) - sums_(r0, c1 + 1) - sums_(r1 + 1, c0) +
               sums_(r0, c0);
    }

    static int count(int r0, int r1, int c0, int c1, int rows, int cols) {
        r0 = std::max(r0, 0);
        c0 = std::max(c0, 0);
        r1 = std::min(r1, rows - 1);
        c1 = std::min(c1, cols - 1);
        if (r0 > r1 || c0 > c1) return 0;
        return (r1 - r0 + 1) * (c1 - c0 + 1);
    }

private:
    int rows_, cols_;
    RMat sums_;
};

/// Threshold multiplier for exponential cells: with n training cells the
/// exact CA-CFAR scale is n (pfa^(-1/n) - 1), applied to the training mean.
inline double ca_scale(double pfa, int n_train) {
    return static_cast<double>(n_train) *
           (std::pow(pfa, -1.0 / static_cast<double>(n_train)) - 1.0);
}

}  // namespace detail

/// Per-cell CA-CFAR thresholds over a 2-D map. Training cells come from the
/// square ring between the guard and training half-widths; windows truncate
/// at the map edges and the scale adapts to the available cell count.
inline RMat cfar_thresholds_2d(const RMat& map, double pfa, const CfarConfig& cfg) {
    cfg.validate();
    require(pfa > 0.0 && pfa < 1.0, "P_fa must be in (0, 1)");
    const int rows = static_cast<int>(map.rows());
    const int cols = static_cast<int>(map.cols());
    require(rows > 2 * cfg.guard + 1 || cols > 2 * cfg.guard + 1,
            "map smaller than the CFAR window");

    const detail::IntegralImage integral(map);
    const int h_out = cfg.guard + cfg.train;
    const int h_in = cfg.guard;
    RMat thr(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double outer = integral.box(r - h_out, r + h_out, c - h_out, c + h_out);
            const double inner = integral.box(r - h_in, r + h_in, c - h_in, c + h_in);
            const int n_tr =
                detail::IntegralImage::count(r - h_out, r + h_out, c - h_out, c + h_out,
                                             rows, cols) -
                detail::IntegralImage::count(r - h_in, r + h_in, c - h_in, c + h_in,
                                             rows, cols);
            thr(r, c) = (outer - inner) / n_tr * detail::ca_scale(pfa, n_tr);
        }
    return thr;
}

/// CA-CFAR detection on a nonnegative 2-D map. A detection is a threshold
/// crossing that is also a strict local maximum over its guard neighborhood
/// (no peak gating when guard = 0).
inline CfarResult cfar_detect_2d(const RMat& map, double pfa, const CfarConfig& cfg) {
    const RMat thr = cfar_thresholds_2d(map, pfa, cfg);
    const int rows = static_cast<int>(map.rows());
    const int cols = static_cast<int>(map.cols());

    CfarResult result;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (!(map(r, c) > thr(r, c))) continue;
            ++result.exceed_count;
            bool is_peak = true;
            for (int dr = -cfg.guard; dr <= cfg.guard && is_peak; ++dr)
                for (int dc = -cfg.guard; dc <= cfg.guard && is_peak; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                    if (map(rr, cc) >= map(r, c)) is_peak = false;
                }
            if (is_peak)
                result.detections.push_back({r, c, map(r, c), thr(r, c)});
        }
    std::sort(result.detections.begin(), result.detections.end(),
              [](const CfarDetection& a, const CfarDetection& b) {
                  return a.value > b.value;
              });
    return result;
}

/// 1-D CA-CFAR thresholds (used on angle spectra).
inline RVec cfar_thresholds_1d(const RVec& data, double pfa, const CfarConfig& cfg) {
    cfg.validate();
    require(pfa > 0.0 && pfa < 1.0, "P_fa must be in (0, 1)");
    const int n = static_cast<int>(data.size());
    require(n > 2 * cfg.guard + 1, "vector smaller than the CFAR window");

    RVec prefix(n + 1);
    prefix(0) = 0.0;
    for (int i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + data(i);
    const auto seg = [&](int lo, int hi) {  // inclusive, clipped
        lo = std::max(lo, 0);
        hi = std::min(hi, n - 1);
        if (lo > hi) return std::pair<double, int>{0.0, 0};
        return std::pair<double, int>{prefix(hi + 1) - prefix(lo), hi - lo + 1};
    };

    RVec thr(n);
    for (int i = 0; i < n; ++i) {
        const auto left = seg(i - cfg.guard - cfg.train, i - cfg.guard - 1);
        const auto right = seg(i + cfg.guard + 1, i + cfg.guard + cfg.train);
        const double sum = left.first + right.first;
        const int n_tr = left.second + right.second;
        thr(i) = sum / n_tr * detail::ca_scale(pfa, n_tr);
    }
    return thr;
}

}  // namespace otfsisac
