#pragma once

#include <Eigen/Cholesky>

#include "otfsisac/common.hpp"
#include "otfsisac/fft.hpp"
#include "otfsisac/params.hpp"

namespace otfsisac {

/// Vectorized received DD-domain symbols and the noise level they carry.
struct DDObservation {
    CVec y_dd;
    double sigma2 = 0.0;
};

/// DD demodulation of the time-domain receive vector: receive pulse shaping
/// per symbol, N-point DFT to the frequency-time grid, then the SFFT back to
/// DD. For identity G_rx this collapses to (F_M kron I_N) y.
inline DDObservation demodulate_dd(const CVec& y_com, const RVec& g_rx,
                                   const OtfsParams& p, double sigma2) {
    require(g_rx.size() == p.n_subcarriers, "g_rx must be diagonal N x N");
    require(y_com.size() == p.grid_size(), "demodulate_dd: size mismatch");
    CMat grid = Eigen::Map<const CMat>(y_com.data(), p.n_subcarriers, p.n_symbols);
    grid.array().colwise() *= g_rx.array().cast<cd>();
    dft_columns_inplace(grid, FFTW_FORWARD);   // to the frequency-time grid
    dft_columns_inplace(grid, FFTW_BACKWARD);  // SFFT, column half
    dft_rows_inplace(grid, FFTW_FORWARD);      // SFFT, row half
    DDObservation obs;
    obs.y_dd = Eigen::Map<const CVec>(grid.data(), grid.size());
    obs.sigma2 = sigma2;
    return obs;
}

inline DDObservation demodulate_dd(const CVec& y_com, const OtfsParams& p,
                                   double sigma2) {
    return demodulate_dd(y_com, RVec::Ones(p.n_subcarriers), p, sigma2);
}

/// LMMSE symbol estimate x = H^H (H H^H + sigma2 I)^{-1} y.
inline CVec lmmse_estimate(const DDObservation& obs, const CMat& h_dd) {
    require(obs.sigma2 > 0.0, "lmmse_estimate: sigma2 must be positive");
    require(h_dd.rows() == obs.y_dd.size() && h_dd.cols() == obs.y_dd.size(),
            "lmmse_estimate: dimension mismatch");
    CMat gram = h_dd * h_dd.adjoint();
    gram.diagonal().array() += obs.sigma2;
    return h_dd.adjoint() * gram.llt().solve(obs.y_dd);
}

/// LMMSE error covariance (I + H^H H / sigma2)^{-1}; Hermitian with
/// eigenvalues in (0, 1].
inline CMat lmmse_covariance(const CMat& h_dd, double sigma2) {
    require(sigma2 > 0.0, "lmmse_covariance: sigma2 must be positive");
    CMat a = (h_dd.adjoint() * h_dd) / sigma2;
    a.diagonal().array() += 1.0;
    const Eigen::Index nm = h_dd.rows();
    return a.llt().solve(CMat::Identity(nm, nm));
}

/// log det of a Hermitian positive definite matrix via Cholesky.
inline double logdet_hermitian(const CMat& a) {
    Eigen::LLT<CMat> llt(a);
    require(llt.info() == Eigen::Success, "logdet: matrix not positive definite");
    const auto diag = llt.matrixL().toDenseMatrix().diagonal();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        const double d = diag(i).real();
        require(std::isfinite(d) && d > 0.0, "logdet: non-finite factor");
        acc += std::log(d);
    }
    return 2.0 * acc;
}

/// Achievable rate in nats from the LMMSE error covariance.
inline double achievable_rate_from_cov(const CMat& r_lmmse) {
    return -logdet_hermitian(r_lmmse);
}

/// Achievable rate in nats computed without forming the covariance inverse:
/// log det(I + H^H H / sigma2).
inline double achievable_rate(const CMat& h_dd, double sigma2) {
    require(sigma2 > 0.0, "achievable_rate: sigma2 must be positive");
    CMat a = (h_dd.adjoint() * h_dd) / sigma2;
    a.diagonal().array() += 1.0;
    return logdet_hermitian(a);
}

}  // namespace otfsisac
