#pragma once

#include "otfsisac/common.hpp"

namespace otfsisac {

/// OTFS numerology plus array sizes shared by every module.
struct OtfsParams {
    int n_subcarriers = 0;      ///< N
    int n_symbols = 0;          ///< M
    double delta_f = 0.0;       ///< subcarrier spacing [Hz]
    double symbol_duration = 0; ///< T [s], must equal 1/delta_f
    double t_cp = 0.0;          ///< cyclic prefix duration [s]
    double fc = 0.0;            ///< carrier frequency [Hz]
    int n_tx = 1;
    int n_rx = 1;

    int grid_size() const { return n_subcarriers * n_symbols; }
    double frame_duration() const { return n_symbols * symbol_duration; }
    double sample_dt() const { return symbol_duration / n_subcarriers; }
    double bandwidth() const { return n_subcarriers * delta_f; }
    double wavelength() const { return SPEED_OF_LIGHT / fc; }

    void validate() const {
        require(n_subcarriers >= 1 && n_symbols >= 1, "N and M must be >= 1");
        require(n_tx >= 1 && n_rx >= 1, "antenna counts must be >= 1");
        require(delta_f > 0.0 && t_cp > 0.0 && fc > 0.0,
                "delta_f, t_cp and fc must be positive");
        const double t_ref = 1.0 / delta_f;
        require(std::abs(symbol_duration - t_ref) <= 1e-12 * t_ref,
                "symbol duration must equal 1/delta_f");
    }
};

inline OtfsParams make_params(int n, int m, double delta_f, double t_cp, double fc,
                              int n_tx, int n_rx) {
    OtfsParams p;
    p.n_subcarriers = n;
    p.n_symbols = m;
    p.delta_f = delta_f;
    p.symbol_duration = 1.0 / delta_f;
    p.t_cp = t_cp;
    p.fc = fc;
    p.n_tx = n_tx;
    p.n_rx = n_rx;
    p.validate();
    return p;
}

/// Uniform linear array spacings in wavelengths. The wide RX spacing makes
/// the TX/RX pair act as a filled virtual ULA of n_tx*n_rx elements under
/// orthogonal transmission.
struct ArrayGeometry {
    double tx_spacing = 0.5;
    double rx_spacing = 0.5;

    void validate() const {
        require(tx_spacing > 0.0 && rx_spacing > 0.0, "array spacings must be positive");
    }
};

inline ArrayGeometry make_default_geometry(const OtfsParams& p) {
    ArrayGeometry g;
    g.tx_spacing = 0.5;
    g.rx_spacing = 0.5 * p.n_tx;
    return g;
}

}  // namespace otfsisac
