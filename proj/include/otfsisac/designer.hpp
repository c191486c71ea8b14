#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "otfsisac/commrx.hpp"
#include "otfsisac/common.hpp"
#include "otfsisac/fft.hpp"
#include "otfsisac/params.hpp"
#include "otfsisac/steering.hpp"

namespace otfsisac {

/// (1/sigma2) sum_k |gain_k|^2 a_tx(theta_k) a_tx(theta_k)^H for a path list.
inline CMat angle_power_form(const std::vector<PathTuple>& paths, const OtfsParams& p,
                             const ArrayGeometry& geom, double sigma2) {
    require(sigma2 > 0.0, "angle_power_form: sigma2 must be positive");
    CMat d = CMat::Zero(p.n_tx, p.n_tx);
    for (const auto& path : paths) {
        const CVec a = tx_steering(path.angle, p, geom);
        d.noalias() += (std::norm(path.gain) / sigma2) * (a * a.adjoint());
    }
    return d;
}

/// Radar and communication quadratic forms (D_rad, D_com).
inline std::pair<CMat, CMat> build_quadratic_forms(const RadarScene& scene,
                                                   const CommChannel& channel,
                                                   const OtfsParams& p,
                                                   const ArrayGeometry& geom,
                                                   double sigma2) {
    return {angle_power_form(scene.targets, p, geom, sigma2),
            angle_power_form(channel.paths, p, geom, sigma2)};
}

/// Radar SNR metric beta^T D_rad conj(beta); independent of the DD power
/// profile, which cancels for unit-power data symbols.
inline double radar_snr(const CVec& beta, const CMat& d_rad) {
    return std::real(beta.transpose() * d_rad * beta.conjugate());
}

inline double radar_snr(const CVec& beta, const RadarScene& scene, const OtfsParams& p,
                        const ArrayGeometry& geom, double sigma2) {
    return radar_snr(beta, angle_power_form(scene.targets, p, geom, sigma2));
}

struct BeamformerResult {
    CVec beta;
    double objective = 0.0;
    bool degenerate = false;
};

/// Maximizes rho beta^T D_rad conj(beta) + (1-rho) beta^T D_com conj(beta)
/// over unit-norm beta: the conjugate of the dominant eigenvector of the
/// blended form, found by power iteration with a deterministic start and a
/// first-nonzero-positive-real phase convention.
inline BeamformerResult solve_beamformer(const CMat& d_rad, const CMat& d_com,
                                         double rho) {
    require(rho >= 0.0 && rho <= 1.0, "rho must be in [0, 1]");
    require(d_rad.rows() == d_com.rows() && d_rad.cols() == d_com.cols(),
            "solve_beamformer: dimension mismatch");
    const CMat d = rho * d_rad + (1.0 - rho) * d_com;
    const Eigen::Index n = d.rows();

    BeamformerResult result;
    if (d.norm() == 0.0) {
        result.beta = CVec::Zero(n);
        result.beta(0) = 1.0;
        result.degenerate = true;
        return result;
    }

    Eigen::Index seed_col = 0;
    d.colwise().norm().maxCoeff(&seed_col);
    CVec v = d.col(seed_col).normalized();
    double lambda = std::real(v.dot(d * v));
    for (int iter = 0; iter < 20000; ++iter) {
        CVec dv = d * v;
        const double norm = dv.norm();
        if (norm == 0.0) break;
        v = dv / norm;
        const double next = std::real(v.dot(d * v));
        if (std::abs(next - lambda) <= 1e-10 * std::max(next, 1e-300)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(v(i)) > 1e-12) {
            v *= std::conj(v(i)) / std::abs(v(i));
            break;
        }
    }
    result.beta = v.conjugate();
    result.objective = lambda;
    return result;
}

namespace detail {

/// First column of the circulant F^H diag(b(tau)) F.
inline CVec circulant_kernel(double tau, const OtfsParams& p) {
    CVec kernel = unitary_idft(freq_steering(tau, p));
    kernel /= std::sqrt(static_cast<double>(p.grid_size()));
    return kernel;
}

/// Path weight gain * beta^T a_tx(angle).
inline cd path_weight(const PathTuple& path, const CVec& beta, const OtfsParams& p,
                      const ArrayGeometry& geom) {
    return path.gain * (beta.transpose() * tx_steering(path.angle, p, geom))(0, 0);
}

}  // namespace detail

/// Dense time-domain composite channel H_T = sum_k w_k C(nu_k) F^H B(tau_k) F
/// for a fixed beamformer. Restricted to NM <= 4096.
inline CMat build_time_channel(const CVec& beta, const CommChannel& channel,
                               const OtfsParams& p, const ArrayGeometry& geom) {
    const Eigen::Index nm = p.grid_size();
    require(nm <= 4096, "build_time_channel: dense path limited to NM <= 4096");
    CMat h = CMat::Zero(nm, nm);
    for (const auto& path : channel.paths) {
        const cd w = detail::path_weight(path, beta, p, geom);
        if (w == cd{0.0, 0.0}) continue;
        const CVec kernel = detail::circulant_kernel(path.delay, p);
        const CVec c = temporal_steering(path.doppler, p);
        for (Eigen::Index j = 0; j < nm; ++j)
            for (Eigen::Index i = 0; i < nm; ++i)
                h(i, j) += w * c(i) * kernel((i - j + nm) % nm);
    }
    return h;
}

/// T A T^H with T = (F_M kron I_N).
inline CMat dd_sandwich(const CMat& a, const OtfsParams& p) {
    const Eigen::Index nm = p.grid_size();
    CMat left(nm, nm);
    for (Eigen::Index j = 0; j < nm; ++j)
        left.col(j) = time_to_dd(a.col(j), p.n_subcarriers, p.n_symbols);
    CMat out(nm, nm);
    CMat left_adj = left.adjoint();
    for (Eigen::Index j = 0; j < nm; ++j)
        out.col(j) = time_to_dd(left_adj.col(j), p.n_subcarriers, p.n_symbols);
    return out.adjoint();
}

/// Dense DD correlation matrix G = (1/sigma2) T H_T^H H_T T^H.
inline CMat build_g_matrix(const CVec& beta, const CommChannel& channel,
                           const OtfsParams& p, const ArrayGeometry& geom,
                           double sigma2) {
    require(sigma2 > 0.0, "build_g_matrix: sigma2 must be positive");
    const CMat h_t = build_time_channel(beta, channel, p, geom);
    const CMat gram = h_t.adjoint() * h_t / sigma2;
    return dd_sandwich(gram, p);
}

/// Diagonal of G computed path-pairwise without forming NM x NM matrices.
/// Each pair contributes through the sparse frequency support of the DD basis
/// vectors and the circulant Doppler-difference kernel.
inline RVec g_diagonal(const CVec& beta, const CommChannel& channel, const OtfsParams& p,
                       const ArrayGeometry& geom, double sigma2) {
    require(sigma2 > 0.0, "g_diagonal: sigma2 must be positive");
    const int n = p.n_subcarriers, m = p.n_symbols;
    const Eigen::Index nm = p.grid_size();
    const std::size_t paths = channel.paths.size();

    std::vector<cd> weights(paths);
    std::vector<CVec> b(paths);
    for (std::size_t k = 0; k < paths; ++k) {
        weights[k] = detail::path_weight(channel.paths[k], beta, p, geom);
        b[k] = freq_steering(channel.paths[k].delay, p);
    }

    RVec g = RVec::Zero(nm);
    CVec gamma(nm);
    CMat rho(2 * n - 1, m);
    for (std::size_t k1 = 0; k1 < paths; ++k1) {
        for (std::size_t k2 = k1; k2 < paths; ++k2) {
            const cd w = weights[k1] * std::conj(weights[k2]);
            if (w == cd{0.0, 0.0}) continue;
            // Frequency-domain circulant kernel of C(nu_k1 - nu_k2).
            gamma = temporal_steering(
                channel.paths[k1].doppler - channel.paths[k2].doppler, p);
            fft_raw(gamma.data(), static_cast<int>(nm), FFTW_FORWARD);
            gamma /= static_cast<double>(nm);

            // rho(u, m0) = sum_j b1[m0 + (j+u)M] conj(b2[m0 + jM])
            for (int u = -(n - 1); u <= n - 1; ++u) {
                const int j_lo = std::max(0, -u), j_hi = std::min(n - 1, n - 1 - u);
                for (int m0 = 0; m0 < m; ++m0) {
                    cd acc = 0.0;
                    for (int j = j_lo; j <= j_hi; ++j)
                        acc += b[k1](m0 + static_cast<Eigen::Index>(j + u) * m) *
                               std::conj(b[k2](m0 + static_cast<Eigen::Index>(j) * m));
                    rho(u + n - 1, m0) = acc;
                }
            }

            for (int m0 = 0; m0 < m; ++m0)
                for (int n0 = 0; n0 < n; ++n0) {
                    cd term = 0.0;
                    for (int u = -(n - 1); u <= n - 1; ++u) {
                        const Eigen::Index d = ((static_cast<Eigen::Index>(u) * m) % nm +
                                                nm) % nm;
                        term += gamma(d) * cis(-2.0 * PI * u * n0 / n) *
                                rho(u + n - 1, m0);
                    }
                    term /= static_cast<double>(n);
                    const Eigen::Index l = static_cast<Eigen::Index>(m0) * n + n0;
                    g(l) += (k1 == k2) ? std::real(w * term) : 2.0 * std::real(w * term);
                }
        }
    }
    return g / sigma2;
}

/// (I + (p p^T) ⊙ G)^{-1}, the LMMSE error covariance as a function of the
/// DD amplitude profile and the DD correlation matrix.
inline CMat lmmse_cov_from_pg(const RVec& p_amp, const CMat& g) {
    require(p_amp.minCoeff() >= 0.0, "p must be nonnegative");
    require(g.rows() == p_amp.size() && g.cols() == p_amp.size(),
            "lmmse_cov_from_pg: dimension mismatch");
    const CVec pd = p_amp.cast<cd>();
    CMat a = pd.asDiagonal() * g * pd.asDiagonal();
    a.diagonal().array() += 1.0;
    return a.llt().solve(CMat::Identity(g.rows(), g.cols()));
}

/// Exact rate log det(I + (p p^T) ⊙ G) without forming the inverse.
inline double rate_from_pg(const RVec& p_amp, const CMat& g) {
    const CVec pd = p_amp.cast<cd>();
    CMat a = pd.asDiagonal() * g * pd.asDiagonal();
    a.diagonal().array() += 1.0;
    return logdet_hermitian(a);
}

/// Spatial-form rate approximation: sum log(1 + q_i beta^T D_com conj(beta)).
inline double approx_rate_spatial(const RVec& q, const CVec& beta, const CMat& d_com) {
    const double gain = std::real(beta.transpose() * d_com * beta.conjugate());
    double rate = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) rate += std::log1p(q(i) * gain);
    return rate;
}

/// Diagonal-form rate approximation: sum log(1 + q_i g_i).
inline double approx_rate_diag(const RVec& q, const RVec& g) {
    require(q.size() == g.size(), "approx_rate_diag: size mismatch");
    double rate = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) rate += std::log1p(q(i) * g(i));
    return rate;
}

/// Water-filling over channel gains g with a total power budget: the exact
/// sorted closed form, q_i = max(0, mu - 1/g_i) with the water level solving
/// the active-set budget equation.
inline RVec waterfill(const RVec& g, double budget) {
    require(budget > 0.0, "waterfill: budget must be positive");
    require(g.minCoeff() >= 0.0, "waterfill: gains must be nonnegative");
    const Eigen::Index n = g.size();

    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i)
        if (g(i) > 0.0) active.push_back(i);
    require(!active.empty(), "waterfill: all channel gains are zero");

    std::sort(active.begin(), active.end(),
              [&](Eigen::Index a, Eigen::Index b) { return g(a) > g(b); });
    std::vector<double> inv(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) inv[k] = 1.0 / g(active[k]);

    double prefix = std::accumulate(inv.begin(), inv.end(), 0.0);
    double level = 0.0;
    std::size_t support = active.size();
    for (; support >= 1; --support) {
        level = (budget + prefix) / static_cast<double>(support);
        if (level >= inv[support - 1]) break;
        prefix -= inv[support - 1];
    }

    RVec q = RVec::Zero(n);
    for (std::size_t k = 0; k < support; ++k) q(active[k]) = level - inv[k];
    return q;
}

struct DesignResult {
    CVec beta;        ///< TX beamformer, unit norm
    RVec p;           ///< DD amplitude profile, sqrt of the power allocation
    double snr_rad = 0.0;
    double rate_nats = 0.0;
    double beam_objective = 0.0;
    bool degenerate_beamformer = false;
};

/// Two-stage trade-off design: Rayleigh-quotient beamformer over the blended
/// quadratic forms, then DD-domain water-filling on the diagonal of the
/// resulting correlation matrix. Reports the radar SNR and the exact rate at
/// the designed point.
inline DesignResult design_isac_signal(const RadarScene& estimated_scene,
                                       const CommChannel& channel, double rho,
                                       const OtfsParams& p, const ArrayGeometry& geom,
                                       double sigma2) {
    const auto [d_rad, d_com] = build_quadratic_forms(estimated_scene, channel, p,
                                                      geom, sigma2);
    const BeamformerResult bf = solve_beamformer(d_rad, d_com, rho);
    const RVec g = g_diagonal(bf.beta, channel, p, geom, sigma2);
    const RVec q = waterfill(g, static_cast<double>(p.grid_size()));

    DesignResult result;
    result.beta = bf.beta;
    result.p = q.cwiseSqrt();
    result.beam_objective = bf.objective;
    result.degenerate_beamformer = bf.degenerate;
    result.snr_rad = radar_snr(bf.beta, d_rad);
    result.rate_nats = rate_from_pg(result.p, build_g_matrix(bf.beta, channel, p, geom,
                                                             sigma2));
    return result;
}

}  // namespace otfsisac
