#pragma once

#include <fftw3.h>

#include <mutex>
#include <unordered_map>

#include "otfsisac/common.hpp"

namespace otfsisac {

/// Process-wide cache of FFTW plans, one per (length, direction).
///
/// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so they can run on
/// arbitrary caller buffers. Plan creation is serialized (the FFTW planner is
/// not thread-safe); execution via fftw_execute_dft on distinct buffers is.
class FftPlans {
public:
    static fftw_plan get(int n, int sign) {
        static FftPlans instance;
        std::lock_guard<std::mutex> lock(instance.mutex_);
        const std::uint64_t key =
            (static_cast<std::uint64_t>(n) << 1) | (sign == FFTW_FORWARD ? 0 : 1);
        auto it = instance.plans_.find(key);
        if (it != instance.plans_.end()) return it->second;
        std::vector<cd> probe(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(probe.data()),
            reinterpret_cast<fftw_complex*>(probe.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        instance.plans_.emplace(key, p);
        return p;
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::unordered_map<std::uint64_t, fftw_plan> plans_;
};

/// Unnormalized in-place transform of a contiguous complex buffer.
inline void fft_raw(cd* data, int n, int sign) {
    fftw_plan p = FftPlans::get(n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

/// x -> F x with the unitary DFT (division by sqrt(n)).
inline void unitary_dft_inplace(CVec& x) {
    fft_raw(x.data(), static_cast<int>(x.size()), FFTW_FORWARD);
    x /= std::sqrt(static_cast<double>(x.size()));
}

/// x -> F^H x with the unitary inverse DFT.
inline void unitary_idft_inplace(CVec& x) {
    fft_raw(x.data(), static_cast<int>(x.size()), FFTW_BACKWARD);
    x /= std::sqrt(static_cast<double>(x.size()));
}

inline CVec unitary_dft(CVec x) {
    unitary_dft_inplace(x);
    return x;
}

inline CVec unitary_idft(CVec x) {
    unitary_idft_inplace(x);
    return x;
}

/// Applies the unitary DFT to every column of a matrix.
inline void dft_columns_inplace(CMat& x, int sign) {
    const int n = static_cast<int>(x.rows());
    for (Eigen::Index c = 0; c < x.cols(); ++c) fft_raw(x.col(c).data(), n, sign);
    x /= std::sqrt(static_cast<double>(n));
}

/// Applies the unitary DFT to every row of a matrix.
inline void dft_rows_inplace(CMat& x, int sign) {
    const int m = static_cast<int>(x.cols());
    CVec row(m);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        row = x.row(r).transpose();
        fft_raw(row.data(), m, sign);
        x.row(r) = row.transpose();
    }
    x /= std::sqrt(static_cast<double>(m));
}

/// (F_M kron I_N) y: maps critically sampled time samples to the DD domain
/// for rectangular receive pulses. Operates on the length-NM vector viewed as
/// an N x M matrix in column-major order.
inline CVec time_to_dd(const CVec& y, int n, int m) {
    require(y.size() == static_cast<Eigen::Index>(n) * m, "time_to_dd: size mismatch");
    CMat grid = Eigen::Map<const CMat>(y.data(), n, m);
    dft_rows_inplace(grid, FFTW_FORWARD);
    return Eigen::Map<const CVec>(grid.data(), grid.size());
}

/// (F_M^H kron I_N) x: inverse of time_to_dd.
inline CVec dd_to_time(const CVec& x, int n, int m) {
    require(x.size() == static_cast<Eigen::Index>(n) * m, "dd_to_time: size mismatch");
    CMat grid = Eigen::Map<const CMat>(x.data(), n, m);
    dft_rows_inplace(grid, FFTW_BACKWARD);
    return Eigen::Map<const CVec>(grid.data(), grid.size());
}

/// Dense unitary DFT matrix; only for small cross-check paths.
inline CMat dense_dft_matrix(int n) {
    CMat f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            f(r, c) = scale * cis(-2.0 * PI * r * c / n);
    return f;
}

}  // namespace otfsisac
