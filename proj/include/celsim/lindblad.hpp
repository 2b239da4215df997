#pragma once

// Dissipators and Liouvillian of the full master equation, time
// evolution of density matrices, and steady-state solving.
//
// Rate conventions, matching the master equation term by term: atomic
// lines enter as (gamma/2)(2 L rho L' - {L'L, rho}) so the jump operator
// carries amplitude sqrt(gamma); cavity lines enter as
// kappa (2 a rho a' - {a'a, rho}) so the amplitude is sqrt(2 kappa).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "celsim/errors.hpp"
#include "celsim/expv.hpp"
#include "celsim/hilbert.hpp"
#include "celsim/model.hpp"

namespace cel {

struct DensityMatrix {
    Truncation trunc;
    Eigen::MatrixXcd mat;

    int dim() const { return trunc.dim(); }
    Complex trace() const { return mat.trace(); }
    double hermiticity_error() const {
        return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (mat + mat.adjoint()),
                                                           Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    double purity() const { return (mat * mat).trace().real(); }

    // trace 1, Hermitian, numerically positive
    void validate(double trace_tol = 1e-9, double herm_tol = 1e-9,
                  double pos_tol = 1e-8) const {
        if (std::abs(trace() - 1.0) > trace_tol)
            throw solver_error("DensityMatrix: trace deviates from 1 by " +
                               std::to_string(std::abs(trace() - 1.0)));
        if (hermiticity_error() > herm_tol)
            throw solver_error("DensityMatrix: Hermiticity violated by " +
                               std::to_string(hermiticity_error()));
        const double lam = min_eigenvalue();
        if (lam < -pos_tol)
            throw solver_error("DensityMatrix: negative eigenvalue " + std::to_string(lam) +
                               "; increase the Fock truncation");
    }
};

inline DensityMatrix basis_state(const Truncation &t, int N1, Level a, int N2) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(t.dim(), t.dim());
    const int i = t.index(N1, a, N2);
    m(i, i) = 1.0;
    return {t, m};
}

inline DensityMatrix vacuum_state(const Truncation &t) {
    return basis_state(t, 0, Level::g, 0);
}

// |alpha> in the designated mode (truncated and renormalized), atom in g.
inline DensityMatrix coherent_state(const Truncation &t, int mode, Complex alpha) {
    if (mode != 1 && mode != 2) throw config_error("coherent_state: mode must be 1 or 2");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(t.dim());
    const int nmax = (mode == 1) ? t.n1_max : t.n2_max;
    Complex amp = 1.0;
    for (int N = 0; N <= nmax; ++N) {
        if (N > 0) amp *= alpha / std::sqrt(double(N));
        const int idx = (mode == 1) ? t.index(N, Level::g, 0) : t.index(0, Level::g, N);
        psi(idx) = amp;
    }
    psi /= psi.norm();
    return {t, psi * psi.adjoint()};
}

// Jump operators with rates folded in as amplitudes.
struct CollapseSet {
    Truncation trunc;
    std::vector<Operator> ops;
};

inline CollapseSet collapse_operators(const SystemParams &p, const Truncation &t) {
    p.validate();
    CollapseSet c{t, {}};
    auto add = [&](double rate, Operator op) {
        if (rate < 0) throw config_error("collapse_operators: negative rate");
        if (rate > 0) c.ops.push_back(std::sqrt(rate) * op);
    };
    add(p.gamma31, atomic_op(Level::g, Level::d, t));
    add(p.gamma32, atomic_op(Level::e, Level::d, t));
    add(p.gamma21, atomic_op(Level::g, Level::e, t));
    add(p.gamma22, atomic_op(Level::e, Level::e, t));
    add(p.gamma33, atomic_op(Level::d, Level::d, t));
    add(2.0 * p.kappa1, annihilation(1, t));
    add(2.0 * p.kappa2, annihilation(2, t));
    return c;
}

namespace detail {

inline SpMat kron_sparse(const SpMat &A, const SpMat &B) {
    SpMat K(A.rows() * B.rows(), A.cols() * B.cols());
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(A.nonZeros()) * B.nonZeros());
    for (int ka = 0; ka < A.outerSize(); ++ka)
        for (SpMat::InnerIterator ia(A, ka); ia; ++ia)
            for (int kb = 0; kb < B.outerSize(); ++kb)
                for (SpMat::InnerIterator ib(B, kb); ib; ++ib)
                    trip.emplace_back(ia.row() * B.rows() + ib.row(),
                                      ia.col() * B.cols() + ib.col(),
                                      ia.value() * ib.value());
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

} // namespace detail

// Superoperator on column-stacked rho:
//   L vec(rho) = vec(-i[H, rho] + sum_k (L_k rho L_k' - 1/2 {L_k'L_k, rho})).
struct Liouvillian {
    Truncation trunc;
    int dim = 0; // Hilbert-space dimension; the matrix side is dim^2
    SpMat mat;
    double norm_scale = 0; // max |entry|, for relative residuals
};

inline Liouvillian liouvillian(const Operator &h, const CollapseSet &c) {
    if (!(h.trunc == c.trunc))
        throw config_error("liouvillian: Hamiltonian and collapse set disagree on the basis");
    const int dim = h.dim();
    SpMat id(dim, dim);
    id.setIdentity();
    const Complex I(0, 1);
    SpMat L = -I * (detail::kron_sparse(id, h.mat) -
                    detail::kron_sparse(SpMat(h.mat.transpose()), id));
    for (const Operator &jop : c.ops) {
        const SpMat &J = jop.mat;
        SpMat JdJ = SpMat(J.adjoint() * J); // intermediate to keep Eigen products sparse
        L = L + detail::kron_sparse(SpMat(J.conjugate()), J);
        L = L - 0.5 * detail::kron_sparse(id, JdJ);
        L = L - 0.5 * detail::kron_sparse(SpMat(JdJ.transpose()), id);
    }
    double scale = 0;
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    return {h.trunc, dim, std::move(L), scale};
}

inline Complex expectation(const DensityMatrix &rho, const Operator &op) {
    if (!(rho.trunc == op.trunc))
        throw config_error("expectation: basis mismatch");
    // Tr(rho op) = sum_ij rho_ij op_ji
    Complex s = 0;
    for (int k = 0; k < op.mat.outerSize(); ++k)
        for (SpMat::InnerIterator it(op.mat, k); it; ++it)
            s += rho.mat(it.col(), it.row()) * it.value();
    return s;
}

struct EvolveOptions {
    double tol = 1e-11;        // propagator error budget
    double trace_tol = 1e-9;   // allowed trace drift at output points
    bool check_state = true;   // assert Hermiticity/positivity at outputs
    int krylov_dim = 36;
};

// rho(t) on an increasing time grid. t_grid[0] may be 0 (copies rho0).
inline std::vector<DensityMatrix> evolve(const DensityMatrix &rho0, const Liouvillian &L,
                                         const std::vector<double> &t_grid,
                                         const EvolveOptions &opt = {}) {
    if (!(rho0.trunc == L.trunc)) throw config_error("evolve: basis mismatch");
    if (t_grid.empty()) return {};
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw config_error("evolve: time grid must be strictly increasing");
    if (t_grid.front() < 0) throw config_error("evolve: negative time");

    const int dim = L.dim;
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.mat.data(), dim * dim);
    ExpvOptions eopt;
    eopt.tol = opt.tol;
    eopt.krylov_dim = opt.krylov_dim;

    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    double t_prev = 0.0;
    for (double tpt : t_grid) {
        if (tpt > t_prev) {
            v = expv(L.mat, v, tpt - t_prev, eopt);
            t_prev = tpt;
        }
        DensityMatrix r{rho0.trunc,
                        Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim)};
        const double drift = std::abs(r.trace() - 1.0);
        if (drift > opt.trace_tol)
            throw solver_error("evolve: trace drift " + std::to_string(drift) +
                               " at t = " + std::to_string(tpt) +
                               "; tighten the tolerance");
        if (opt.check_state) r.validate(opt.trace_tol, 1e-8, 1e-8);
        out.push_back(std::move(r));
    }
    return out;
}

struct SteadyStateOptions {
    bool reduce_components = true; // solve only the block reachable from the diagonal
    bool verify_unique = true;     // second solve with a different trace row
    int unique_check_max_side = 60000;
    double residual_tol = 1e-8;    // vs norm_scale
    bool validate_state = true;
    // direct sparse LU up to this many rows; preconditioned BiCGSTAB above
    int direct_max_rows = 400000;
};

namespace detail {

// Connected components of the symmetrized sparsity pattern (union-find).
// Weak symmetries of the master equation split vec(rho) into decoupled
// blocks; only the block containing the diagonal can host the steady
// state when it is unique.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a); b = find(b);
        if (a != b) parent_[a] = b;
    }

private:
    std::vector<int> parent_;
};

struct ReducedBlock {
    std::vector<int> sel;    // global indices in the block, sorted
    std::vector<int> local;  // global -> local (-1 outside)
};

inline ReducedBlock diagonal_block(const SpMat &L, int dim) {
    const int side = dim * dim;
    UnionFind uf(side);
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it)
            uf.unite(static_cast<int>(it.row()), static_cast<int>(it.col()));
    const int root = uf.find(0); // element (0,0) of rho
    for (int i = 1; i < dim; ++i)
        if (uf.find(i * dim + i) != root)
            // fall back to the full system; the caller treats empty as "no reduction"
            return {};
    ReducedBlock b;
    b.local.assign(side, -1);
    for (int i = 0; i < side; ++i)
        if (uf.find(i) == root) {
            b.local[i] = static_cast<int>(b.sel.size());
            b.sel.push_back(i);
        }
    return b;
}

// Solve L x = 0, trace(x) = 1 by replacing the row of one diagonal
// element with the trace functional. The replacement changes the
// conditioning of the system, so one step of iterative refinement
// against the modified matrix is applied afterwards. Direct LU up to
// direct_max_rows; ILUT-preconditioned BiCGSTAB beyond that.
inline Eigen::VectorXcd solve_with_trace_row(const SpMat &L, int dim,
                                             const std::vector<int> &sel,
                                             const std::vector<int> &local,
                                             int replace_diag, int direct_max_rows,
                                             double *residual) {
    const int nb = static_cast<int>(sel.size());
    const int row_replaced = local[replace_diag * dim + replace_diag];
    std::vector<Triplet> trip;
    trip.reserve(L.nonZeros());
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it) {
            const int r = local[it.row()], c = local[it.col()];
            if (r < 0 || c < 0) continue;
            if (r == row_replaced) continue;
            trip.emplace_back(r, c, it.value());
        }
    for (int i = 0; i < dim; ++i) {
        const int c = local[i * dim + i];
        if (c >= 0) trip.emplace_back(row_replaced, c, Complex(1.0, 0.0));
    }
    SpMat Lb(nb, nb);
    Lb.setFromTriplets(trip.begin(), trip.end());
    Lb.makeCompressed();
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(nb);
    b(row_replaced) = 1.0;

    Eigen::VectorXcd x;
    if (nb <= direct_max_rows) {
        Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(Lb);
        lu.factorize(Lb);
        if (lu.info() != Eigen::Success)
            throw solver_error("steady_state: sparse LU factorization failed "
                               "(singular modified Liouvillian)");
        x = lu.solve(b);
        x += lu.solve(Eigen::VectorXcd(b - Lb * x));
    } else {
        Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<Complex>> solver;
        solver.preconditioner().setFillfactor(40);
        solver.preconditioner().setDroptol(1e-6);
        solver.setTolerance(1e-12);
        solver.setMaxIterations(2000);
        solver.compute(Lb);
        if (solver.info() != Eigen::Success)
            throw solver_error("steady_state: ILUT preconditioner setup failed");
        x = solver.solve(b);
        if (solver.info() != Eigen::Success)
            throw solver_error("steady_state: BiCGSTAB did not converge (error " +
                               std::to_string(solver.error()) + ")");
    }
    if (residual) {
        // residual of the unmodified equation L x = 0, excluding the trace row
        Eigen::VectorXcd lx = Lb * x - b;
        lx(row_replaced) = 0.0;
        *residual = lx.norm() / x.norm();
    }
    return x;
}

} // namespace detail

inline DensityMatrix steady_state(const Liouvillian &L, const SteadyStateOptions &opt = {}) {
    const int dim = L.dim;
    const int side = dim * dim;

    detail::ReducedBlock block;
    if (opt.reduce_components) block = detail::diagonal_block(L.mat, dim);
    if (block.sel.empty()) {
        block.sel.resize(side);
        std::iota(block.sel.begin(), block.sel.end(), 0);
        block.local.resize(side);
        std::iota(block.local.begin(), block.local.end(), 0);
    }

    double res1 = 0;
    Eigen::VectorXcd x = detail::solve_with_trace_row(L.mat, dim, block.sel, block.local, 0,
                                                      opt.direct_max_rows, &res1);

    const double rel1 = res1 / std::max(L.norm_scale, 1e-300);
    double rel2 = -1;
    if (opt.verify_unique && dim > 1 &&
        static_cast<int>(block.sel.size()) <= opt.unique_check_max_side) {
        double res2 = 0;
        Eigen::VectorXcd x2 = detail::solve_with_trace_row(
            L.mat, dim, block.sel, block.local, dim - 1, opt.direct_max_rows, &res2);
        rel2 = res2 / std::max(L.norm_scale, 1e-300);
        const double diff = (x - x2).norm() / std::max(x.norm(), 1e-300);
        if (diff > 1e-6)
            throw solver_error(
                "steady_state: null space is degenerate or near-degenerate; two "
                "trace-pinned solves disagree by " + std::to_string(diff) +
                " (relative residuals " + std::to_string(rel1) + ", " +
                std::to_string(rel2) + ")");
    }
    if (rel1 > opt.residual_tol)
        throw solver_error("steady_state: solution residual " + std::to_string(rel1) +
                           " exceeds tolerance" +
                           (rel2 >= 0 ? " (second solve residual " + std::to_string(rel2) + ")"
                                      : ""));

    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(side);
    for (size_t i = 0; i < block.sel.size(); ++i) full(block.sel[i]) = x(i);
    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(full.data(), dim, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    DensityMatrix out{L.trunc, std::move(rho)};
    if (opt.validate_state) out.validate();
    return out;
}

// Observable row used by trajectory outputs and convergence checks.
struct FieldObservables {
    double n1 = 0, n2 = 0;
    double p_g = 0, p_e = 0, p_d = 0;
    Complex a1, a2, a1a2;
};

// Truncation health of a full steady-state solve: repeat at a larger
// cutoff and report the relative shift of the photon numbers. Shifts
// above ~1% mean the Fock space is clipping the state.
struct TruncationConvergence {
    double n1 = 0, n2 = 0;           // at the requested truncation
    double n1_refined = 0, n2_refined = 0; // at (+dn, +dn)
    double shift_n1 = 0, shift_n2 = 0;     // relative

    bool converged(double tol = 0.01) const {
        return std::abs(shift_n1) < tol && std::abs(shift_n2) < tol;
    }
};

inline TruncationConvergence
steady_truncation_check(const SystemParams &p, const FrameSpec &frame, const Truncation &t,
                        int dn = 4, const SteadyStateOptions &opt = {}) {
    auto solve_at = [&](const Truncation &tr) {
        const auto h = build_hamiltonian(p, frame, tr);
        return steady_state(liouvillian(h.static_part, collapse_operators(p, tr)), opt);
    };
    const DensityMatrix a = solve_at(t);
    const DensityMatrix b = solve_at(Truncation{t.n1_max + dn, t.n2_max + dn});
    TruncationConvergence out;
    out.n1 = expectation(a, number_op(1, t)).real();
    out.n2 = expectation(a, number_op(2, t)).real();
    const Truncation t2{t.n1_max + dn, t.n2_max + dn};
    out.n1_refined = expectation(b, number_op(1, t2)).real();
    out.n2_refined = expectation(b, number_op(2, t2)).real();
    out.shift_n1 = (out.n1_refined - out.n1) / std::max(out.n1_refined, 1e-12);
    out.shift_n2 = (out.n2_refined - out.n2) / std::max(out.n2_refined, 1e-12);
    return out;
}

inline FieldObservables field_observables(const DensityMatrix &rho) {
    const Truncation &t = rho.trunc;
    FieldObservables f;
    f.n1 = expectation(rho, number_op(1, t)).real();
    f.n2 = expectation(rho, number_op(2, t)).real();
    f.p_g = expectation(rho, atomic_op(Level::g, Level::g, t)).real();
    f.p_e = expectation(rho, atomic_op(Level::e, Level::e, t)).real();
    f.p_d = expectation(rho, atomic_op(Level::d, Level::d, t)).real();
    f.a1 = expectation(rho, annihilation(1, t));
    f.a2 = expectation(rho, annihilation(2, t));
    f.a1a2 = expectation(rho, annihilation(1, t) * annihilation(2, t));
    return f;
}

} // namespace cel
