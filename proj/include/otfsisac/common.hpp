#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otfsisac {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double PI = 3.14159265358979323846;
inline constexpr cd J{0.0, 1.0};

// Propagation speed used by the range/velocity conversions. The reference
// parameter tables are computed with the rounded value, not the SI exact one.
inline constexpr double SPEED_OF_LIGHT = 3.0e8;

inline cd cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

inline double deg2rad(double deg) { return deg * PI / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / PI; }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Relative Frobenius distance, with an absolute fallback when the reference
// is numerically zero.
template <typename DerivedA, typename DerivedB>
double relative_error(const Eigen::MatrixBase<DerivedA>& value,
                      const Eigen::MatrixBase<DerivedB>& reference) {
    const double ref_norm = reference.norm();
    const double diff = (value - reference).norm();
    return ref_norm > 0.0 ? diff / ref_norm : diff;
}

}  // namespace otfsisac
