#pragma once

#include <numeric>
#include <vector>

#include "otfsisac/common.hpp"
#include "otfsisac/fft.hpp"
#include "otfsisac/params.hpp"
#include "otfsisac/rng.hpp"

namespace otfsisac {

/// Delay-Doppler data grid, N rows (delay bins) by M columns (Doppler bins).
struct DDFrame {
    CMat x_dd;
};

/// Unit-average-power square QAM frame (order 4, 16 or 64).
inline DDFrame random_qam_frame(const OtfsParams& p, Rng& rng, int order = 64) {
    require(order == 4 || order == 16 || order == 64, "QAM order must be 4, 16 or 64");
    const int side = order == 4 ? 2 : (order == 16 ? 4 : 8);
    // Mean square of the PAM levels {±1, ±3, ...} per dimension.
    double level_power = 0.0;
    for (int k = 0; k < side; ++k) {
        const double level = 2.0 * k - (side - 1);
        level_power += level * level;
    }
    const double scale = 1.0 / std::sqrt(2.0 * level_power / side);
    DDFrame frame;
    frame.x_dd.resize(p.n_subcarriers, p.n_symbols);
    for (Eigen::Index c = 0; c < frame.x_dd.cols(); ++c)
        for (Eigen::Index r = 0; r < frame.x_dd.rows(); ++r) {
            const int re = static_cast<int>(rng.uniform_int(side));
            const int im = static_cast<int>(rng.uniform_int(side));
            frame.x_dd(r, c) = scale * cd(2.0 * re - (side - 1), 2.0 * im - (side - 1));
        }
    return frame;
}

enum class TxMode { Search, Track };

/// Per-antenna DD windowing. Search mode holds disjoint Boolean masks that
/// tile the grid; track mode uses one common amplitude profile p scaled by a
/// per-antenna beamforming coefficient.
struct WindowSet {
    TxMode mode = TxMode::Search;
    std::vector<CMat> w;  ///< one N x M window per TX antenna
    CVec beta;            ///< track only
    RVec p;               ///< track only, length NM
    double total_power = 0.0;

    void validate(const OtfsParams& params) const {
        require(static_cast<int>(w.size()) == params.n_tx, "window count must equal n_tx");
        for (const auto& wi : w)
            require(wi.rows() == params.n_subcarriers && wi.cols() == params.n_symbols,
                    "window dimensions must match the frame");
        if (mode == TxMode::Search) {
            CMat sum = CMat::Zero(params.n_subcarriers, params.n_symbols);
            for (std::size_t i = 0; i < w.size(); ++i) {
                sum += w[i];
                for (std::size_t j = i + 1; j < w.size(); ++j)
                    require((w[i].array() * w[j].array()).matrix().norm() == 0.0,
                            "search windows must be disjoint");
            }
            require((sum - CMat::Ones(sum.rows(), sum.cols())).norm() < 1e-12,
                    "search windows must tile the grid");
        } else {
            require(beta.size() == params.n_tx, "beta length must equal n_tx");
            require(p.size() == params.grid_size(), "p length must equal N*M");
            require(p.minCoeff() >= 0.0, "p must be nonnegative");
        }
    }
};

/// Random balanced partition of the NM bins over the TX antennas; each
/// antenna gets floor(NM/n_tx) or ceil(NM/n_tx) bins.
inline WindowSet make_search_windows(const OtfsParams& p, Rng& rng) {
    const int nm = p.grid_size();
    std::vector<int> bins(nm);
    std::iota(bins.begin(), bins.end(), 0);
    for (int i = nm - 1; i > 0; --i)
        std::swap(bins[i], bins[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);

    WindowSet ws;
    ws.mode = TxMode::Search;
    ws.w.assign(p.n_tx, CMat::Zero(p.n_subcarriers, p.n_symbols));
    for (int k = 0; k < nm; ++k) {
        const int antenna = k % p.n_tx;
        const int row = bins[k] % p.n_subcarriers;
        const int col = bins[k] / p.n_subcarriers;
        ws.w[antenna](row, col) = 1.0;
    }
    ws.total_power = 0.0;
    for (const auto& wi : ws.w) ws.total_power += wi.squaredNorm();
    return ws;
}

inline WindowSet make_track_windows(const OtfsParams& params, const CVec& beta,
                                    const RVec& p) {
    require(beta.size() == params.n_tx, "beta length must equal n_tx");
    require(p.size() == params.grid_size(), "p length must equal N*M");
    WindowSet ws;
    ws.mode = TxMode::Track;
    ws.beta = beta;
    ws.p = p;
    ws.w.reserve(params.n_tx);
    const Eigen::Map<const RMat> profile(p.data(), params.n_subcarriers, params.n_symbols);
    for (int i = 0; i < params.n_tx; ++i)
        ws.w.push_back(beta(i) * profile.cast<cd>());
    ws.total_power = 0.0;
    for (const auto& wi : ws.w) ws.total_power += wi.squaredNorm();
    return ws;
}

/// Elementwise windowing of the frame, one output grid per TX antenna.
inline std::vector<CMat> apply_windows(const DDFrame& frame, const WindowSet& windows) {
    std::vector<CMat> out;
    out.reserve(windows.w.size());
    for (const auto& wi : windows.w) {
        require(wi.rows() == frame.x_dd.rows() && wi.cols() == frame.x_dd.cols(),
                "apply_windows: dimension mismatch");
        out.push_back(frame.x_dd.cwiseProduct(wi));
    }
    return out;
}

/// DD -> frequency-time map: F_N X F_M^H (N-point DFT over columns, M-point
/// inverse DFT over rows, both unitary).
inline CMat isfft(const CMat& x) {
    CMat out = x;
    dft_columns_inplace(out, FFTW_FORWARD);
    dft_rows_inplace(out, FFTW_BACKWARD);
    return out;
}

/// Frequency-time -> DD map, inverse of isfft.
inline CMat sfft(const CMat& x) {
    CMat out = x;
    dft_columns_inplace(out, FFTW_BACKWARD);
    dft_rows_inplace(out, FFTW_FORWARD);
    return out;
}

/// vec(G_tx F_N^H X_ft): critically sampled time signal at t = l*T/N, with a
/// diagonal transmit pulse-shaping matrix (identity for rectangular pulses).
inline CVec heisenberg_time_signal(const CMat& x_ft, const RVec& g_tx) {
    require(g_tx.size() == x_ft.rows(), "g_tx must be diagonal N x N");
    CMat time = x_ft;
    dft_columns_inplace(time, FFTW_BACKWARD);
    time.array().colwise() *= g_tx.array().cast<cd>();
    return Eigen::Map<const CVec>(time.data(), time.size());
}

/// Sampled transmit waveform, one column per TX antenna, plus the
/// continuous-time evaluators used by the model checks.
struct WaveformMatrix {
    CMat s;        ///< NM x n_tx samples at t = l*T/N
    RVec g_tx;     ///< diagonal pulse-shaping gains
    OtfsParams params;
    std::vector<CMat> x_dd_windowed;  ///< per-antenna windowed DD grids
    std::vector<CMat> x_ft;           ///< per-antenna frequency-time grids

    /// Piecewise evaluation of the transmitted signal on [0, MT): the sum of
    /// subcarrier exponentials of the active symbol, gated by the rectangular
    /// pulse and sampled pulse-shaping gain.
    cd time_signal(int antenna, double t) const {
        const int n = params.n_subcarriers, m = params.n_symbols;
        const double period = params.frame_duration();
        if (t < 0.0 || t >= period) return 0.0;
        const int symbol = std::min(static_cast<int>(t / params.symbol_duration), m - 1);
        const double offset = t - symbol * params.symbol_duration;
        // Pulse shaping is defined by its samples; evaluate at the nearest
        // sample slot the same way the sampled chain does.
        const int slot = std::min(static_cast<int>(offset / params.sample_dt()), n - 1);
        cd acc = 0.0;
        for (int in = 0; in < n; ++in)
            acc += x_ft[antenna](in, symbol) * cis(2.0 * PI * in * params.delta_f * offset);
        return g_tx(slot) * acc / std::sqrt(static_cast<double>(n));
    }

    /// CP-extended signal on [-T_cp, MT): the prefix replays the frame tail.
    cd time_signal_cp(int antenna, double t) const {
        if (t < 0.0) return time_signal(antenna, t + params.frame_duration());
        return time_signal(antenna, t);
    }
};

/// Builds the sampled waveform matrix: column i equals
/// vec(G_tx (X_dd ⊙ W_i) F_M^H), i.e. the Heisenberg transform of the
/// ISFFT of the windowed frame.
inline WaveformMatrix build_waveform_matrix(const DDFrame& frame, const WindowSet& windows,
                                            const OtfsParams& params, const RVec& g_tx) {
    require(g_tx.size() == params.n_subcarriers, "g_tx must be diagonal N x N");
    WaveformMatrix wf;
    wf.params = params;
    wf.g_tx = g_tx;
    wf.x_dd_windowed = apply_windows(frame, windows);
    wf.x_ft.reserve(params.n_tx);
    wf.s.resize(params.grid_size(), params.n_tx);
    for (int i = 0; i < params.n_tx; ++i) {
        wf.x_ft.push_back(isfft(wf.x_dd_windowed[i]));
        wf.s.col(i) = heisenberg_time_signal(wf.x_ft[i], g_tx);
    }
    return wf;
}

inline WaveformMatrix build_waveform_matrix(const DDFrame& frame, const WindowSet& windows,
                                            const OtfsParams& params) {
    return build_waveform_matrix(frame, windows, params,
                                 RVec::Ones(params.n_subcarriers));
}

}  // namespace otfsisac
