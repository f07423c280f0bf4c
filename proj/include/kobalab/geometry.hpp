#pragma once

#include <Eigen/Dense>
#include <complex>

namespace kobalab {

// Points and vectors of C^n. The real picture interleaves coordinates as
// (Re z_1, Im z_1, ..., Re z_n, Im z_n); all CLI and file formats use the
// same order.
using CPoint = Eigen::VectorXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline RVec to_real(const CVec& z) {
    RVec x(2 * z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        x[2 * j] = z[j].real();
        x[2 * j + 1] = z[j].imag();
    }
    return x;
}

inline CVec to_complex(const RVec& x) {
    CVec z(x.size() / 2);
    for (Eigen::Index j = 0; j < z.size(); ++j)
        z[j] = std::complex<double>(x[2 * j], x[2 * j + 1]);
    return z;
}

// Hermitian inner product sum_j a_j conj(b_j); its real part equals the
// Euclidean product of the interleaved real vectors.
inline std::complex<double> hdot(const CVec& a, const CVec& b) {
    std::complex<double> s = 0;
    for (Eigen::Index j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
    return s;
}

inline CVec unit(const CVec& v) { return v / v.norm(); }

}  // namespace kobalab
