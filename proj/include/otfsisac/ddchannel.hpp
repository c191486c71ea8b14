#pragma once

#include "otfsisac/common.hpp"
#include "otfsisac/fft.hpp"
#include "otfsisac/frame.hpp"
#include "otfsisac/steering.hpp"
#include "otfsisac/synth.hpp"

namespace otfsisac {

/// Stacks the vectorized per-antenna windows into an NM x n_tx matrix.
inline CMat window_matrix(const WindowSet& ws) {
    require(!ws.w.empty(), "window set is empty");
    const Eigen::Index nm = ws.w[0].size();
    CMat w(nm, static_cast<Eigen::Index>(ws.w.size()));
    for (std::size_t i = 0; i < ws.w.size(); ++i)
        w.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const CVec>(ws.w[i].data(), nm);
    return w;
}

/// Dense DD-domain channel matrix mapping vec(X_dd) to the received DD
/// symbols: each path contributes its delay/Doppler distortion wrapped in
/// the DD/time transforms, keyed by the DD weights W a_T(angle).
///
/// Dense construction is intended for NM <= 4096.
inline CMat build_hdd(const WindowSet& windows, const CommChannel& channel,
                      const OtfsParams& p, const ArrayGeometry& geom) {
    const Eigen::Index nm = p.grid_size();
    require(nm <= 4096, "build_hdd: dense path limited to NM <= 4096");
    check_scene_delays(channel.paths, p);

    const CMat w = window_matrix(windows);
    std::vector<CVec> dd_weights;  // W a_T per path
    dd_weights.reserve(channel.paths.size());
    for (const auto& path : channel.paths)
        dd_weights.push_back(w * tx_steering(path.angle, p, geom));

    CMat h = CMat::Zero(nm, nm);
    CVec basis = CVec::Zero(nm);
    for (Eigen::Index j = 0; j < nm; ++j) {
        basis(j) = 1.0;
        const CVec base_time = dd_to_time(basis, p.n_subcarriers, p.n_symbols);
        basis(j) = 0.0;

        CVec column = CVec::Zero(nm);
        for (std::size_t k = 0; k < channel.paths.size(); ++k) {
            const auto& path = channel.paths[k];
            column += path.gain * dd_weights[k](j) *
                      delay_doppler_distort(base_time, path.delay, path.doppler, p);
        }
        h.col(j) = time_to_dd(column, p.n_subcarriers, p.n_symbols);
    }
    return h;
}

}  // namespace otfsisac
