#pragma once

#include <optional>
#include <vector>

#include "otfsisac/cfar.hpp"
#include "otfsisac/common.hpp"
#include "otfsisac/fft.hpp"
#include "otfsisac/params.hpp"
#include "otfsisac/steering.hpp"
#include "otfsisac/synth.hpp"

namespace otfsisac {

/// Uniform delay-Doppler search grid.
struct DDGrid {
    RVec tau_axis;  ///< strictly increasing [s]
    RVec nu_axis;   ///< strictly increasing [Hz]
    int os_delay = 2;
    int os_doppler = 2;

    void validate() const {
        require(tau_axis.size() >= 1 && nu_axis.size() >= 1, "empty grid axis");
        for (Eigen::Index i = 1; i < tau_axis.size(); ++i)
            require(tau_axis(i) > tau_axis(i - 1), "tau axis must be strictly increasing");
        for (Eigen::Index i = 1; i < nu_axis.size(); ++i)
            require(nu_axis(i) > nu_axis(i - 1), "nu axis must be strictly increasing");
    }

    double delay_step() const {
        return tau_axis.size() > 1 ? tau_axis(1) - tau_axis(0) : 0.0;
    }
    double doppler_step() const {
        return nu_axis.size() > 1 ? nu_axis(1) - nu_axis(0) : 0.0;
    }
};

/// Optional span overrides for the search grid. Delay spans are clamped to
/// the CP-limited extended interval, Doppler spans to the intra-symbol
/// sampling limit.
struct DDGridSpec {
    int os_delay = 2;
    int os_doppler = 2;
    std::optional<double> delay_max;    ///< [s], default min{M/delta_f, T_cp}
    std::optional<double> doppler_min;  ///< [Hz], default -N/(2T)
    std::optional<double> doppler_max;  ///< [Hz], default +N/(2T)
};

inline DDGrid make_dd_grid(const OtfsParams& p, const DDGridSpec& spec = {}) {
    require(spec.os_delay >= 1 && spec.os_doppler >= 1, "oversampling must be >= 1");
    const double tau_step = 1.0 / (p.n_subcarriers * p.delta_f * spec.os_delay);
    const double nu_step = p.delta_f / (p.n_symbols * spec.os_doppler);
    const double tau_limit = std::min(p.n_symbols / p.delta_f, p.t_cp);
    const double nu_limit = 0.5 * p.n_subcarriers / p.symbol_duration;

    const double tau_max = std::min(spec.delay_max.value_or(tau_limit), tau_limit);
    const double nu_lo = std::max(spec.doppler_min.value_or(-nu_limit), -nu_limit);
    const double nu_hi = std::min(spec.doppler_max.value_or(nu_limit), nu_limit);
    require(tau_max > 0.0 && nu_hi > nu_lo, "degenerate grid span");

    DDGrid grid;
    grid.os_delay = spec.os_delay;
    grid.os_doppler = spec.os_doppler;
    const int n_tau = static_cast<int>(std::floor(tau_max / tau_step + 1e-9)) + 1;
    const int n_nu = static_cast<int>(std::floor((nu_hi - nu_lo) / nu_step + 1e-9)) + 1;
    grid.tau_axis = tau_step * RVec::LinSpaced(n_tau, 0.0, n_tau - 1.0);
    grid.nu_axis = RVec::Constant(n_nu, nu_lo) +
                   nu_step * RVec::LinSpaced(n_nu, 0.0, n_nu - 1.0);
    grid.validate();
    return grid;
}

/// Spatial snapshot S^H F^H B^H(tau) F C^H(nu) Y, the n_tx x n_rx matrix the
/// detector statistics and the angle stage are built from.
inline CMat compute_snapshot(const CMat& y, const CMat& s, const OtfsParams& p,
                             double tau, double nu) {
    const CVec b_conj = freq_steering(tau, p).conjugate();
    const CVec c_conj = temporal_steering(nu, p).conjugate();
    CMat s_hat = s;
    dft_columns_inplace(s_hat, FFTW_FORWARD);

    CMat snapshot(s.cols(), y.cols());
    CVec z(y.rows());
    for (Eigen::Index r = 0; r < y.cols(); ++r) {
        z = y.col(r).cwiseProduct(c_conj);
        unitary_dft_inplace(z);
        z = z.cwiseProduct(b_conj);
        for (Eigen::Index i = 0; i < s.cols(); ++i) snapshot(i, r) = s_hat.col(i).dot(z);
    }
    return snapshot;
}

/// Noncoherently integrated detection statistic at a single continuous
/// delay-Doppler hypothesis.
inline double glrt_statistic(const CMat& y, const CMat& s, const OtfsParams& p,
                             double tau, double nu) {
    return compute_snapshot(y, s, p, tau, nu).squaredNorm();
}

/// Matched-filter spatial output (S^H S)^{-1} S^H F^H B^H F C^H Y; for a
/// noiseless single target at the tuned hypothesis this equals
/// gain * a_tx(theta) a_rx(theta)^T, the virtual-array response.
inline CMat matched_filter_output(const CMat& y, const CMat& s, const OtfsParams& p,
                                  double tau, double nu) {
    const CMat gram = s.adjoint() * s;
    return gram.ldlt().solve(compute_snapshot(y, s, p, tau, nu));
}

/// Full statistic map over the grid. On conforming axes (delay starting at
/// zero with spacing 1/(N delta_f os)) each antenna pair and Doppler bin is
/// evaluated for all delays at once with a zero-padded inverse FFT; the
/// result matches the pointwise statistic to floating-point accuracy.
inline RMat glrt_map(const CMat& y, const CMat& s, const OtfsParams& p,
                     const DDGrid& grid) {
    grid.validate();
    const Eigen::Index nm = p.grid_size();
    require(y.rows() == nm && s.rows() == nm, "glrt_map: sample count mismatch");

    const int n_tau = static_cast<int>(grid.tau_axis.size());
    const int n_nu = static_cast<int>(grid.nu_axis.size());
    const double tau_step = 1.0 / (p.n_subcarriers * p.delta_f * grid.os_delay);
    const Eigen::Index padded = nm * grid.os_delay;

    bool fast = n_tau <= padded;
    for (int a = 0; a < n_tau && fast; ++a)
        if (std::abs(grid.tau_axis(a) - a * tau_step) > 1e-12 * tau_step * (a + 1))
            fast = false;

    RMat map = RMat::Zero(n_tau, n_nu);
    if (!fast) {
        for (int a = 0; a < n_tau; ++a)
            for (int b = 0; b < n_nu; ++b)
                map(a, b) = glrt_statistic(y, s, p, grid.tau_axis(a), grid.nu_axis(b));
        return map;
    }

    CMat s_hat = s;
    dft_columns_inplace(s_hat, FFTW_FORWARD);
    const double scale = 1.0 / std::sqrt(static_cast<double>(nm));

    CVec z(nm);
    CVec prod = CVec::Zero(padded);
    for (int b = 0; b < n_nu; ++b) {
        const CVec c_conj = temporal_steering(grid.nu_axis(b), p).conjugate();
        for (Eigen::Index r = 0; r < y.cols(); ++r) {
            z = y.col(r).cwiseProduct(c_conj);
            fft_raw(z.data(), static_cast<int>(nm), FFTW_FORWARD);
            for (Eigen::Index i = 0; i < s.cols(); ++i) {
                prod.head(nm) = scale * s_hat.col(i).conjugate().cwiseProduct(z);
                prod.tail(padded - nm).setZero();
                fft_raw(prod.data(), static_cast<int>(padded), FFTW_BACKWARD);
                for (int a = 0; a < n_tau; ++a) map(a, b) += std::norm(prod(a));
            }
        }
    }
    return map;
}

/// Coherent angle spectrum at a detected delay-Doppler point, evaluated from
/// the spatial snapshot: |a_tx^H U conj(a_rx)|^2 / (a_tx^H S^H S a_tx).
inline RVec angle_spectrum(const CMat& snapshot, const CMat& gram, const OtfsParams& p,
                           const ArrayGeometry& geom, const RVec& theta_axis) {
    RVec spec(theta_axis.size());
    for (Eigen::Index k = 0; k < theta_axis.size(); ++k) {
        const CVec a_t = tx_steering(theta_axis(k), p, geom);
        const CVec a_r = rx_steering(theta_axis(k), p, geom);
        const double den = std::real(a_t.dot(gram * a_t));
        require(den > 0.0, "angle_spectrum: nonpositive normalization");
        spec(k) = std::norm(a_t.dot(snapshot * a_r.conjugate())) / den;
    }
    return spec;
}

struct AngleSearchConfig {
    double step_deg = 0.5;
    double min_deg = -90.0;
    double max_deg = 90.0;
    int max_iterations = 4;  ///< successive interference subtraction rounds
    CfarConfig cfar{16, 2};  ///< 1-D CFAR geometry on the spectrum

    RVec axis() const {
        const int count = static_cast<int>(std::floor((max_deg - min_deg) / step_deg)) + 1;
        RVec axis(count);
        for (int i = 0; i < count; ++i) axis(i) = deg2rad(min_deg + i * step_deg);
        return axis;
    }
};

struct AngleDetection {
    double theta = 0.0;
    double spectrum_value = 0.0;
};

/// Multi-target angle estimation at one delay-Doppler detection: find the
/// strongest spectrum peak above its CFAR threshold, remove its least-squares
/// fitted rank-one contribution from the snapshot and repeat. Subtracting the
/// stronger target unmasks weaker ones sharing the same delay-Doppler bin.
inline std::vector<AngleDetection> detect_angles(const CMat& snapshot, const CMat& gram,
                                                 const OtfsParams& p,
                                                 const ArrayGeometry& geom,
                                                 const RVec& theta_axis, double pfa,
                                                 const AngleSearchConfig& cfg) {
    std::vector<AngleDetection> found;
    CMat residual = snapshot;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const RVec spec = angle_spectrum(residual, gram, p, geom, theta_axis);
        const RVec thr = cfar_thresholds_1d(spec, pfa, cfg.cfar);
        Eigen::Index best = 0;
        spec.maxCoeff(&best);
        if (!(spec(best) > thr(best))) break;
        const double theta = theta_axis(best);
        found.push_back({theta, spec(best)});

        const CVec a_t = tx_steering(theta, p, geom);
        const CVec a_r = rx_steering(theta, p, geom);
        const CMat response = (gram * a_t) * a_r.transpose();
        const cd fitted_gain =
            (response.conjugate().cwiseProduct(residual)).sum() / response.squaredNorm();
        residual -= fitted_gain * response;
    }
    return found;
}

struct Detection {
    double tau = 0.0;
    double nu = 0.0;
    double theta = 0.0;
    cd gain{0.0, 0.0};
    double statistic = 0.0;
    double threshold = 0.0;
};

struct SensingReport {
    std::vector<Detection> detections;
    RMat map;           ///< statistic over (tau, nu)
    RVec tau_axis;
    RVec nu_axis;
    double pfa = 0.0;
};

/// Least-squares gain for a detection, evaluated from the original snapshot:
/// trace(A^H Y)/||A||_F^2 reduced to the spatial domain.
inline cd estimate_gain(const CMat& snapshot, const CMat& gram, const OtfsParams& p,
                        const ArrayGeometry& geom, double theta) {
    const CVec a_t = tx_steering(theta, p, geom);
    const CVec a_r = rx_steering(theta, p, geom);
    const double den = p.n_rx * std::real(a_t.dot(gram * a_t));
    return a_t.dot(snapshot * a_r.conjugate()) / den;
}

/// Detection pipeline over the extended delay-Doppler region: statistic map,
/// 2-D CA-CFAR with peak gating, then per-detection angle estimation with
/// interference subtraction and gain fitting.
inline SensingReport run_glrt_detection(const CMat& y, const CMat& s, const OtfsParams& p,
                                        const ArrayGeometry& geom, const DDGrid& grid,
                                        double pfa, const CfarConfig& cfar_cfg,
                                        const AngleSearchConfig& angle_cfg) {
    SensingReport report;
    report.pfa = pfa;
    report.tau_axis = grid.tau_axis;
    report.nu_axis = grid.nu_axis;
    report.map = glrt_map(y, s, p, grid);

    const CfarResult cfar = cfar_detect_2d(report.map, pfa, cfar_cfg);
    const CMat gram = s.adjoint() * s;
    const RVec theta_axis = angle_cfg.axis();
    for (const auto& bin : cfar.detections) {
        const double tau = grid.tau_axis(bin.row);
        const double nu = grid.nu_axis(bin.col);
        const CMat snapshot = compute_snapshot(y, s, p, tau, nu);
        const auto angles =
            detect_angles(snapshot, gram, p, geom, theta_axis, pfa, angle_cfg);
        for (const auto& ang : angles) {
            Detection det;
            det.tau = tau;
            det.nu = nu;
            det.theta = ang.theta;
            det.gain = estimate_gain(snapshot, gram, p, geom, ang.theta);
            det.statistic = bin.value;
            det.threshold = bin.threshold;
            report.detections.push_back(det);
        }
    }
    return report;
}

}  // namespace otfsisac
