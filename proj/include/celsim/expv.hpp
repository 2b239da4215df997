#pragma once

// Krylov-subspace approximation of w = exp(t A) v for a large sparse A,
// with adaptive substepping and a posteriori error control (the classic
// EXPOKIT scheme). The Liouvillians here are constant in time, so this
// is the workhorse behind density-matrix evolution.

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

#include "celsim/errors.hpp"
#include "celsim/hilbert.hpp"

namespace cel {

struct ExpvOptions {
    double tol = 1e-11;   // error budget relative to |v|, for the whole horizon
    int krylov_dim = 36;  // Arnoldi subspace size
    double min_step_frac = 1e-12; // below this fraction of t, give up (stiffness guard)
};

struct ExpvStats {
    int steps = 0;
    int matvecs = 0;
    int rejected = 0;
};

inline Eigen::VectorXcd expv(const SpMat &A, const Eigen::VectorXcd &v, double t,
                             const ExpvOptions &opt = {}, ExpvStats *stats = nullptr) {
    using Eigen::MatrixXcd;
    using Eigen::VectorXcd;
    const int n = static_cast<int>(v.size());
    if (A.rows() != n || A.cols() != n)
        throw config_error("expv: dimension mismatch");
    const double beta0 = v.norm();
    if (t == 0.0 || beta0 == 0.0) return v;

    // infinity norm of A, for step-size heuristics only
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            rowsum(it.row()) += std::abs(it.value());
    const double anorm = std::max(rowsum.maxCoeff(), 1e-300);

    const int m = std::max(1, std::min(opt.krylov_dim, n - 1));
    const double gamma = 0.9;

    VectorXcd w = v;
    double t_done = 0.0;
    double tau = std::min(t, 10.0 / anorm);

    MatrixXcd V(n, m + 1);
    MatrixXcd H = MatrixXcd::Zero(m + 2, m + 2);

    while (t_done < t) {
        tau = std::min(tau, t - t_done);
        if (tau < opt.min_step_frac * t)
            throw solver_error("expv: step size underflow (stiff generator); "
                               "evolve in a slow co-rotating frame");

        const double beta = w.norm();
        V.col(0) = w / beta;
        H.setZero();
        int mb = m;
        bool happy = false;
        for (int j = 0; j < m; ++j) {
            VectorXcd p = A * V.col(j);
            if (stats) ++stats->matvecs;
            const double pnorm = p.norm();
            for (int i = 0; i <= j; ++i) {
                const Complex h = V.col(i).dot(p); // conjugates V
                H(i, j) = h;
                p -= h * V.col(i);
            }
            const double hn = p.norm();
            // invariant subspace to machine precision: exact within it
            if (hn <= 1e-12 * std::max(pnorm, 1e-300)) {
                mb = j + 1;
                happy = true;
                break;
            }
            H(j + 1, j) = hn;
            V.col(j + 1) = p / hn;
        }

        double avnorm = 0.0;
        if (!happy) {
            avnorm = (A * V.col(m)).norm();
            if (stats) ++stats->matvecs;
            H(m + 1, m) = 1.0; // augmented column for the error estimate
        }
        const int msub = happy ? mb : m + 2;

        while (true) {
            MatrixXcd F = (tau * H.topLeftCorner(msub, msub)).exp();
            double err_loc = 0.0;
            double xm = 1.0 / m;
            if (!happy) {
                const double err1 = std::abs(beta * F(m, 0));
                const double err2 = std::abs(beta * F(m + 1, 0)) * avnorm;
                if (err1 > 10.0 * err2) {
                    err_loc = err2;
                } else if (err1 > err2) {
                    err_loc = err1 * err2 / (err1 - err2);
                } else {
                    err_loc = err1;
                    xm = 1.0 / (m - 1);
                }
            }
            const double budget = opt.tol * beta0 * (tau / t);
            if (happy || err_loc <= budget) {
                w = V.leftCols(mb) * (beta * F.col(0).head(mb));
                t_done += tau;
                if (stats) ++stats->steps;
                const double err_eff = std::max(err_loc, budget * 1e-3);
                tau = std::min({gamma * tau * std::pow(budget / err_eff, xm), 2.0 * tau,
                                t - t_done > 0 ? t - t_done : tau});
                if (tau <= 0) tau = t - t_done;
                break;
            }
            tau = gamma * tau * std::pow(budget / err_loc, xm);
            if (stats) ++stats->rejected;
            if (tau < opt.min_step_frac * t)
                throw solver_error("expv: cannot meet tolerance (stiff generator); "
                                   "evolve in a slow co-rotating frame");
        }
    }
    return w;
}

} // namespace cel
