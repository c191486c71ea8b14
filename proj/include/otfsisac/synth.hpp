#pragma once

#include "otfsisac/common.hpp"
#include "otfsisac/fft.hpp"
#include "otfsisac/frame.hpp"
#include "otfsisac/steering.hpp"

namespace otfsisac {

/// Time-spatial radar observation: NM samples by n_rx antennas.
struct RadarObservation {
    CMat y;
    double sigma2 = 0.0;
};

inline void check_scene_delays(const std::vector<PathTuple>& paths, const OtfsParams& p) {
    for (const auto& path : paths) {
        require(path.delay >= 0.0, "path delay must be nonnegative");
        require(path.delay <= p.t_cp, "path delay must not exceed the CP duration");
    }
}

inline void add_noise(CMat& y, double sigma2, Rng& rng) {
    if (sigma2 <= 0.0) return;
    for (Eigen::Index c = 0; c < y.cols(); ++c)
        for (Eigen::Index r = 0; r < y.rows(); ++r) y(r, c) += rng.cnormal(sigma2);
}

/// Applies the per-path distortion C(nu) F^H B(tau) F to a sampled signal.
inline CVec delay_doppler_distort(const CVec& x, double tau, double nu,
                                  const OtfsParams& p) {
    CVec spec = unitary_dft(x);
    spec.array() *= freq_steering(tau, p).array();
    CVec out = unitary_idft(spec);
    out.array() *= temporal_steering(nu, p).array();
    return out;
}

/// Compact radar observation model: per target, the transmit mix S a_T is
/// passed through the diagonal delay/Doppler operators in the global DFT
/// domain and spread over the RX array.
inline RadarObservation synth_radar_compact(const CMat& s, const RadarScene& scene,
                                            const OtfsParams& p, const ArrayGeometry& geom,
                                            double sigma2, Rng& rng) {
    check_scene_delays(scene.targets, p);
    RadarObservation obs;
    obs.sigma2 = sigma2;
    obs.y = CMat::Zero(p.grid_size(), p.n_rx);
    for (const auto& target : scene.targets) {
        const CVec mix = s * tx_steering(target.angle, p, geom);
        const CVec echo = delay_doppler_distort(mix, target.delay, target.doppler, p);
        obs.y.noalias() +=
            target.gain * echo * rx_steering(target.angle, p, geom).transpose();
    }
    add_noise(obs.y, sigma2, rng);
    return obs;
}

namespace detail {

/// Spectral coefficients of each waveform column over one frame period,
/// computed by direct summation so the oracle path shares no transform code
/// with the compact model.
inline CMat direct_spectra(const CMat& s) {
    const Eigen::Index nm = s.rows();
    CMat spectra(nm, s.cols());
    const double scale = 1.0 / std::sqrt(static_cast<double>(nm));
    for (Eigen::Index i = 0; i < s.cols(); ++i)
        for (Eigen::Index q = 0; q < nm; ++q) {
            cd acc = 0.0;
            for (Eigen::Index l = 0; l < nm; ++l)
                acc += s(l, i) * cis(-2.0 * PI * static_cast<double>(q) * l / nm);
            spectra(q, i) = scale * acc;
        }
    return spectra;
}

/// Evaluates the frame-periodic transmitted waveform (the trigonometric
/// interpolant through its critically sampled values) at an arbitrary time.
inline cd eval_interpolant(const CVec& spectrum, double t, double period) {
    const Eigen::Index nm = spectrum.size();
    cd acc = 0.0;
    for (Eigen::Index q = 0; q < nm; ++q)
        acc += spectrum(q) * cis(2.0 * PI * static_cast<double>(q) * t / period);
    return acc / std::sqrt(static_cast<double>(nm));
}

}  // namespace detail

/// Continuous-time oracle for the radar model: samples the backscattered sum
/// of delayed, Doppler-shifted transmit waveforms directly, without the
/// steering-vector/DFT factorization. The transmitted waveform is the
/// band-limited frame-periodic signal defined by the sampled chain, so the
/// cyclic shift is implied by periodicity.
inline RadarObservation synth_radar_oracle(const CMat& s, const RadarScene& scene,
                                           const OtfsParams& p, const ArrayGeometry& geom,
                                           double sigma2, Rng& rng) {
    check_scene_delays(scene.targets, p);
    const Eigen::Index nm = p.grid_size();
    const double period = p.frame_duration();
    const CMat spectra = detail::direct_spectra(s);

    RadarObservation obs;
    obs.sigma2 = sigma2;
    obs.y = CMat::Zero(nm, p.n_rx);
    for (const auto& target : scene.targets) {
        const CVec a_t = tx_steering(target.angle, p, geom);
        const CVec a_r = rx_steering(target.angle, p, geom);
        const CVec mixed_spectrum = spectra * a_t;
        for (Eigen::Index l = 0; l < nm; ++l) {
            const double t = static_cast<double>(l) * p.sample_dt();
            const cd value = target.gain * cis(2.0 * PI * target.doppler * t) *
                             detail::eval_interpolant(mixed_spectrum, t - target.delay, period);
            for (int r = 0; r < p.n_rx; ++r) obs.y(l, r) += value * a_r(r);
        }
    }
    add_noise(obs.y, sigma2, rng);
    return obs;
}

/// Compact MISO observation at the communication receiver.
inline CVec synth_comm(const CMat& s, const CommChannel& channel, const OtfsParams& p,
                       const ArrayGeometry& geom, double sigma2, Rng& rng) {
    check_scene_delays(channel.paths, p);
    CVec y = CVec::Zero(p.grid_size());
    for (const auto& path : channel.paths) {
        const CVec mix = s * tx_steering(path.angle, p, geom);
        y += path.gain * delay_doppler_distort(mix, path.delay, path.doppler, p);
    }
    if (sigma2 > 0.0)
        for (Eigen::Index l = 0; l < y.size(); ++l) y(l) += rng.cnormal(sigma2);
    return y;
}

/// Direct-sum MISO oracle, the single-output analogue of synth_radar_oracle.
inline CVec synth_comm_oracle(const CMat& s, const CommChannel& channel,
                              const OtfsParams& p, const ArrayGeometry& geom,
                              double sigma2, Rng& rng) {
    check_scene_delays(channel.paths, p);
    const Eigen::Index nm = p.grid_size();
    const double period = p.frame_duration();
    const CMat spectra = detail::direct_spectra(s);

    CVec y = CVec::Zero(nm);
    for (const auto& path : channel.paths) {
        const CVec mixed_spectrum = spectra * tx_steering(path.angle, p, geom);
        for (Eigen::Index l = 0; l < nm; ++l) {
            const double t = static_cast<double>(l) * p.sample_dt();
            y(l) += path.gain * cis(2.0 * PI * path.doppler * t) *
                    detail::eval_interpolant(mixed_spectrum, t - path.delay, period);
        }
    }
    if (sigma2 > 0.0)
        for (Eigen::Index l = 0; l < y.size(); ++l) y(l) += rng.cnormal(sigma2);
    return y;
}

}  // namespace otfsisac
