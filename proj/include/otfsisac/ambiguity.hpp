#pragma once

#include "otfsisac/common.hpp"
#include "otfsisac/params.hpp"

namespace otfsisac {

/// Largest unambiguous delay. With the inter-symbol phase signature included
/// the frequency axis is sampled at delta_f/M instead of delta_f, stretching
/// the limit by a factor of M; the CP duration caps both variants.
inline double unambiguous_delay(const OtfsParams& p, bool with_isi, bool cap_by_cp = true) {
    const double base = with_isi ? p.n_symbols / p.delta_f : 1.0 / p.delta_f;
    return cap_by_cp ? std::min(base, p.t_cp) : base;
}

/// Full unambiguous Doppler width. The intra-symbol signature samples the
/// frame at T/N instead of T, stretching the limit by a factor of N.
inline double unambiguous_doppler(const OtfsParams& p, bool with_ici) {
    return with_ici ? p.n_subcarriers / p.symbol_duration : 1.0 / p.symbol_duration;
}

inline double max_range(const OtfsParams& p, bool with_isi, bool cap_by_cp = true) {
    return 0.5 * SPEED_OF_LIGHT * unambiguous_delay(p, with_isi, cap_by_cp);
}

/// One-sided velocity limit: the Doppler interval is centered on zero, so the
/// +/- velocity span is a quarter wavelength times the Doppler width.
inline double max_velocity(const OtfsParams& p, bool with_ici) {
    return 0.25 * unambiguous_doppler(p, with_ici) * p.wavelength();
}

}  // namespace otfsisac
