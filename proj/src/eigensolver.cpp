#include <specbounds/error.hpp>
#include <specbounds/laplace.hpp>
#include <specbounds/parallel.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace specbounds {

namespace {

// Shift-inverted operator A = (K - sigma M)^{-1} M, self-adjoint in the
// M inner product. Its largest eigenvalues nu map to the smallest
// lambda = sigma + 1/nu of the pencil.
//
// The kernel of K is spanned by the indicator vectors of the connected
// components and is known exactly, so it is locked up front and the
// iteration runs on its M-complement. Left inside, its eigenvalue
// nu = -1/sigma would dominate every projected matrix and cap the attainable
// residual near eps / |sigma|.
class ShiftInvert {
public:
    ShiftInvert(const SpectralPair& pair, double shift)
        : m_mass(pair.mass)
    {
        SparseMatrix shifted = pair.stiffness;
        for (int i = 0; i < pair.vertex_count; ++i) shifted.coeffRef(i, i) -= shift * pair.mass[i];
        m_solver.compute(shifted);
        if (m_solver.info() != Eigen::Success) {
            throw Error(ErrorKind::Numerical, "sparse factorisation of K - sigma M failed");
        }
        build_kernel(pair);
    }

    /// A applied to vectors M-orthogonal to the kernel; the result is
    /// projected back onto that complement.
    Eigen::MatrixXd apply_free(const Eigen::MatrixXd& x) const
    {
        Eigen::MatrixXd out = m_solver.solve(m_mass.asDiagonal() * x);
        if (m_solver.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "shift-invert solve failed");
        out -= m_kernel * (m_kernel.transpose() * (m_mass.asDiagonal() * out));
        return out;
    }

    const Eigen::MatrixXd& kernel() const { return m_kernel; }

private:
    // M-orthonormal component indicators, from the sparsity pattern of K.
    void build_kernel(const SpectralPair& pair)
    {
        const int n = pair.vertex_count;
        std::vector<int> label(n, -1);
        int count = 0;
        std::vector<int> stack;
        for (int start = 0; start < n; ++start) {
            if (label[start] >= 0) continue;
            label[start] = count;
            stack.push_back(start);
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                for (SparseMatrix::InnerIterator it(pair.stiffness, v); it; ++it) {
                    const int w = static_cast<int>(it.index());
                    if (label[w] < 0) {
                        label[w] = count;
                        stack.push_back(w);
                    }
                }
            }
            ++count;
        }
        m_kernel = Eigen::MatrixXd::Zero(n, count);
        Eigen::VectorXd comp_mass = Eigen::VectorXd::Zero(count);
        for (int v = 0; v < n; ++v) comp_mass[label[v]] += pair.mass[v];
        for (int v = 0; v < n; ++v) m_kernel(v, label[v]) = 1.0 / std::sqrt(comp_mass[label[v]]);
    }

    const Eigen::VectorXd& m_mass;
    Eigen::SimplicialLDLT<SparseMatrix> m_solver;
    Eigen::MatrixXd m_kernel;
};

// Orthogonalises the columns of w against the M-orthonormal basis q (two
// classical Gram-Schmidt passes), then orthonormalises w in place and drops
// columns that have become numerically dependent.
Eigen::MatrixXd orthonormalize_block(const Eigen::MatrixXd& q, Eigen::MatrixXd w, const Eigen::VectorXd& mass)
{
    const Eigen::VectorXd before = (w.transpose() * mass.asDiagonal() * w).diagonal().cwiseSqrt();
    for (int pass = 0; pass < 2 && q.cols() > 0; ++pass) {
        w -= q * (q.transpose() * (mass.asDiagonal() * w));
    }
    Eigen::MatrixXd out(w.rows(), w.cols());
    int kept = 0;
    for (int c = 0; c < w.cols(); ++c) {
        Eigen::VectorXd v = w.col(c);
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < kept; ++j) v -= out.col(j).dot(mass.cwiseProduct(v)) * out.col(j);
            if (q.cols() > 0) v -= q * (q.transpose() * mass.cwiseProduct(v));
        }
        const double norm = std::sqrt(v.dot(mass.cwiseProduct(v)));
        if (!(norm > 1e-10 * std::max(before[c], 1e-300))) continue;
        out.col(kept++) = v / norm;
    }
    return out.leftCols(kept);
}

Eigen::MatrixXd random_block(int rows, int cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd w(rows, cols);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) w(r, c) = gauss(rng);
    }
    return w;
}

// Leading left singular directions (M inner product) of r, at most
// max_cols of them, dropping those below 1e-10 of the largest.
Eigen::MatrixXd dominant_columns(const Eigen::MatrixXd& r, const Eigen::VectorXd& mass, int max_cols)
{
    Eigen::MatrixXd gram = r.transpose() * (mass.asDiagonal() * r);
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd& sigma2 = eig.eigenvalues();
    const double top = sigma2.size() > 0 ? sigma2.maxCoeff() : 0.0;
    Eigen::MatrixXd out(r.rows(), 0);
    for (Eigen::Index j = sigma2.size() - 1; j >= 0 && out.cols() < max_cols; --j) {
        if (!(sigma2[j] > 1e-20 * top) || !(top > 0.0)) break;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = r * eig.eigenvectors().col(j) / std::sqrt(sigma2[j]);
    }
    return out;
}

void append_columns(Eigen::MatrixXd& m, const Eigen::MatrixXd& extra)
{
    const Eigen::Index old = m.cols();
    m.conservativeResize(m.rows(), old + extra.cols());
    m.rightCols(extra.cols()) = extra;
}

} // namespace

Spectrum eigs(const SpectralPair& pair, int k, double tol, const EigsOptions& options)
{
    const int n = pair.vertex_count;
    if (k < 0) throw_precondition("eigenvalue count k must be non-negative");
    if (k + 1 >= n) {
        throw_precondition("k too large: need k + 1 < V (k = " + std::to_string(k) + ", V = " + std::to_string(n) + ")");
    }
    if (!(tol > 0.0) || tol > 1e-4) throw_precondition("eigensolver tolerance must lie in (0, 1e-4]");

    const int nev = k + 1;
    const Eigen::VectorXd& mass = pair.mass;
    ShiftInvert op(pair, options.shift);
    const Eigen::MatrixXd& kernel = op.kernel();
    const int locked = std::min<int>(nev, static_cast<int>(kernel.cols()));
    const int nev_free = nev - locked;
    const int n_free = n - static_cast<int>(kernel.cols());

    Spectrum result;
    result.k_requested = k;
    result.area = pair.total_area();
    std::vector<double> lambda(nev);
    std::vector<double> residuals(nev, std::numeric_limits<double>::infinity());
    Eigen::MatrixXd vectors(n, nev);

    auto record = [&](int j, const Eigen::VectorXd& u, const Eigen::VectorXd& ku) {
        const Eigen::VectorXd mu = mass.cwiseProduct(u);
        lambda[j] = u.dot(ku) / u.dot(mu);
        residuals[j] = (ku - lambda[j] * mu).norm() / mu.norm();
        vectors.col(j) = u;
        return residuals[j] <= tol;
    };
    for (int j = 0; j < locked; ++j) record(j, kernel.col(j), pair.stiffness * kernel.col(j));

    auto finish = [&]() {
        result.eigenvalues = lambda;
        result.residuals = residuals;
        if (options.keep_vectors) {
            result.eigenvectors = vectors;
            for (int j = 0; j < nev; ++j) {
                Eigen::Index pivot = 0;
                result.eigenvectors.col(j).cwiseAbs().maxCoeff(&pivot);
                if (result.eigenvectors(pivot, j) < 0.0) result.eigenvectors.col(j) *= -1.0;
            }
        }
        result.normalized.resize(nev);
        for (int j = 0; j < nev; ++j) result.normalized[j] = result.eigenvalues[j] * result.area;
        result.clusters = cluster_eigenvalues(result.eigenvalues, options.cluster_gap);
        return result;
    };
    if (nev_free == 0) {
        for (int j = 0; j < nev; ++j) {
            if (!(residuals[j] <= tol)) throw ConvergenceError("kernel vectors fail the residual test", residuals);
        }
        return finish();
    }

    const int block = std::max(1, std::min(options.block_size, n_free / 4 > 0 ? n_free / 4 : 1));
    const int ncv = std::min(n_free, std::max(2 * nev_free + 2 * block, nev_free + 4 * block));
    std::mt19937_64 rng = make_stream(0x1a2b3c4dULL, static_cast<std::uint64_t>(n));

    auto with_kernel = [&](const Eigen::MatrixXd& q) {
        Eigen::MatrixXd basis(n, kernel.cols() + q.cols());
        basis << kernel, q;
        return basis;
    };

    Eigen::MatrixXd q = orthonormalize_block(kernel, random_block(n, block, rng), mass);
    Eigen::MatrixXd z = op.apply_free(q);
    Eigen::MatrixXd pending = z;  // next candidate block (image of the last block)

    for (int restart = 0;; ++restart) {
        while (q.cols() < ncv) {
            Eigen::MatrixXd w = orthonormalize_block(with_kernel(q), pending, mass);
            if (w.cols() == 0) {
                w = orthonormalize_block(with_kernel(q), random_block(n, std::min<int>(block, ncv - q.cols()), rng), mass);
                if (w.cols() == 0) break;
            }
            if (w.cols() > n_free - q.cols()) w = w.leftCols(n_free - q.cols()).eval();
            const Eigen::MatrixXd zw = op.apply_free(w);
            append_columns(q, w);
            append_columns(z, zw);
            pending = zw;
        }

        // Rayleigh-Ritz with K itself for the reported pairs.
        const Eigen::MatrixXd kq = pair.stiffness * q;
        Eigen::MatrixXd h = q.transpose() * kq;
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
        const int wanted = std::min<int>(nev_free, static_cast<int>(h.rows()));
        const Eigen::MatrixXd s = ritz.eigenvectors().leftCols(wanted);  // ascending lambda
        const Eigen::MatrixXd y = q * s;
        const Eigen::MatrixXd ky = kq * s;
        bool converged = wanted == nev_free;
        for (int j = 0; j < wanted; ++j) {
            if (!record(locked + j, y.col(j), ky.col(j))) converged = false;
        }
        result.restarts = restart;

        const bool exhausted = q.cols() >= n_free;
        if (converged) return finish();
        if (exhausted || restart >= options.max_restarts) {
            throw ConvergenceError(
                "eigensolver did not reach tolerance after " + std::to_string(restart) + " restarts", residuals);
        }

        // Thick restart from the Ritz vectors of the inverted operator: their
        // residuals share one block of directions, which seeds the next block.
        Eigen::MatrixXd hz = q.transpose() * (mass.asDiagonal() * z);
        hz = 0.5 * (hz + hz.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inverted(hz);
        const Eigen::MatrixXd sz = inverted.eigenvectors().rowwise().reverse();  // descending nu
        const int keep = std::clamp(nev_free + (ncv - nev_free - block) / 2, nev_free, std::max(nev_free, ncv - block));
        const Eigen::MatrixXd outside = z - q * (q.transpose() * (mass.asDiagonal() * z));
        pending = dominant_columns(outside * sz.leftCols(keep), mass, block);
        q = (q * sz.leftCols(keep)).eval();
        z = (z * sz.leftCols(keep)).eval();
    }
}

} // namespace specbounds
