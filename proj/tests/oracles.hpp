#pragma once

// Independent brute-force constructions used as test oracles. Everything
// here is built from dense Kronecker products and dense linear algebra,
// deliberately sharing no code with the library implementation paths it
// checks.

#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "celsim/lindblad.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat dense_kron(const Mat &A, const Mat &B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

inline Mat dense_destroy(int nmax) {
    Mat a = Mat::Zero(nmax + 1, nmax + 1);
    for (int n = 1; n <= nmax; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

inline Mat dense_sigma(int j, int k) {
    Mat s = Mat::Zero(3, 3);
    s(j, k) = 1.0;
    return s;
}

// composite-space operator, ordering mode1 x atom x mode2
inline Mat embed(const Mat &m1, const Mat &at, const Mat &m2) {
    return dense_kron(dense_kron(m1, at), m2);
}

inline Mat dense_mode_op(int which, const Mat &op, int n1max, int n2max) {
    const Mat i1 = Mat::Identity(n1max + 1, n1max + 1);
    const Mat ia = Mat::Identity(3, 3);
    const Mat i2 = Mat::Identity(n2max + 1, n2max + 1);
    return which == 1 ? embed(op, ia, i2) : embed(i1, ia, op);
}

inline Mat dense_atomic(int j, int k, int n1max, int n2max) {
    const Mat i1 = Mat::Identity(n1max + 1, n1max + 1);
    const Mat i2 = Mat::Identity(n2max + 1, n2max + 1);
    return embed(i1, dense_sigma(j, k), i2);
}

// dense Liouvillian matrix (column-stacking convention)
inline Mat dense_liouvillian(const Mat &H, const std::vector<Mat> &jumps) {
    const int d = static_cast<int>(H.rows());
    const Mat id = Mat::Identity(d, d);
    const Complex I(0, 1);
    Mat L = -I * (dense_kron(id, H) - dense_kron(H.transpose(), id));
    for (const Mat &J : jumps) {
        const Mat JdJ = J.adjoint() * J;
        L += dense_kron(J.conjugate(), J) - 0.5 * dense_kron(id, JdJ) -
             0.5 * dense_kron(JdJ.transpose(), id);
    }
    return L;
}

// exact evolution by dense matrix exponential
inline Mat dense_evolve(const Mat &L, const Mat &rho0, double t) {
    const int d = static_cast<int>(rho0.rows());
    const Mat P = (t * L).exp();
    Vec v = Eigen::Map<const Vec>(rho0.data(), d * d);
    v = P * v;
    return Eigen::Map<const Mat>(v.data(), d, d);
}

// Duan witness straight from a density matrix with full-space quadrature
// operators (no moment closure).
inline double duan_from_rho(const cel::DensityMatrix &rho) {
    const int n1max = rho.trunc.n1_max, n2max = rho.trunc.n2_max;
    const Complex I(0, 1);
    const Mat a1 = dense_mode_op(1, dense_destroy(n1max), n1max, n2max);
    const Mat a2 = dense_mode_op(2, dense_destroy(n2max), n1max, n2max);
    const Mat x1 = (a1 + a1.adjoint()) / std::sqrt(2.0);
    const Mat x2 = (a2 + a2.adjoint()) / std::sqrt(2.0);
    const Mat p1 = (a1 - a1.adjoint()) / (std::sqrt(2.0) * I);
    const Mat p2 = (a2 - a2.adjoint()) / (std::sqrt(2.0) * I);
    const Mat u = x1 + x2, v = p1 - p2;
    auto ev = [&](const Mat &op) { return (rho.mat * op).trace().real(); };
    const double var_u = ev(u * u) - ev(u) * ev(u);
    const double var_v = ev(v * v) - ev(v) * ev(v);
    return var_u + var_v;
}

inline Mat random_hermitian(int dim, unsigned seed, bool trace_one = true) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(nd(gen), nd(gen));
    m = 0.5 * (m + m.adjoint()).eval();
    if (trace_one) {
        m = m * m.adjoint(); // positive
        m /= m.trace().real();
    }
    return m;
}

} // namespace oracle
