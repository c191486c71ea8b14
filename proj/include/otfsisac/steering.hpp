#pragma once

#include <vector>

#include "otfsisac/common.hpp"
#include "otfsisac/params.hpp"

namespace otfsisac {

/// One propagation path: complex gain, round-trip delay, Doppler shift and
/// azimuth angle.
struct PathTuple {
    cd gain{0.0, 0.0};
    double delay = 0.0;    ///< [s]
    double doppler = 0.0;  ///< [Hz]
    double angle = 0.0;    ///< [rad]
};

struct RadarScene {
    std::vector<PathTuple> targets;
};

/// Multipath channel towards the communication receiver; paths[0] is LOS.
struct CommChannel {
    std::vector<PathTuple> paths;
};

// Round-trip conversions for monostatic sensing.
inline double delay_from_range(double range_m) { return 2.0 * range_m / SPEED_OF_LIGHT; }
inline double range_from_delay(double tau_s) { return 0.5 * tau_s * SPEED_OF_LIGHT; }
inline double doppler_from_velocity(double v_mps, const OtfsParams& p) {
    return 2.0 * v_mps / p.wavelength();
}
inline double velocity_from_doppler(double nu_hz, const OtfsParams& p) {
    return 0.5 * nu_hz * p.wavelength();
}

/// Frequency-domain delay signature over the NM global frequency bins
/// (spacing delta_f/M). Kronecker form: the outer length-N factor carries the
/// per-subcarrier rotation, the inner length-M factor the inter-symbol one.
inline CVec freq_steering(double tau, const OtfsParams& p) {
    const int n = p.n_subcarriers, m = p.n_symbols;
    CVec b(static_cast<Eigen::Index>(n) * m);
    const double base = -2.0 * PI * p.delta_f * tau;
    for (int in = 0; in < n; ++in) {
        const cd outer = cis(base * in);
        for (int im = 0; im < m; ++im)
            b(static_cast<Eigen::Index>(in) * m + im) =
                outer * cis(base * im / m);
    }
    return b;
}

/// Time-domain Doppler signature over the NM samples at t = l*T/N. The outer
/// length-M factor is the symbol-rate progression, the inner length-N factor
/// the intra-symbol rotation.
inline CVec temporal_steering(double nu, const OtfsParams& p) {
    const int n = p.n_subcarriers, m = p.n_symbols;
    CVec c(static_cast<Eigen::Index>(n) * m);
    const double base = 2.0 * PI * p.symbol_duration * nu;
    for (int im = 0; im < m; ++im) {
        const cd outer = cis(base * im);
        for (int in = 0; in < n; ++in)
            c(static_cast<Eigen::Index>(im) * n + in) =
                outer * cis(base * in / n);
    }
    return c;
}

/// ULA phase response, first element as reference, spacing in wavelengths.
inline CVec ula_steering(double theta, int count, double spacing) {
    CVec a(count);
    const double base = 2.0 * PI * spacing * std::sin(theta);
    for (int k = 0; k < count; ++k) a(k) = cis(base * k);
    return a;
}

inline CVec tx_steering(double theta, const OtfsParams& p, const ArrayGeometry& g) {
    return ula_steering(theta, p.n_tx, g.tx_spacing);
}

inline CVec rx_steering(double theta, const OtfsParams& p, const ArrayGeometry& g) {
    return ula_steering(theta, p.n_rx, g.rx_spacing);
}

}  // namespace otfsisac
