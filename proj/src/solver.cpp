#include "pwdg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include <Eigen/SparseQR>
#include <unsupported/Eigen/IterativeSolvers>
#include <suitesparse/umfpack.h>

namespace pwdg
{
    SolveMethod parse_solve_method(const std::string& s)
    {
        if (s == "lu" || s == "direct")
            return SolveMethod::DirectLU;
        if (s == "qr")
            return SolveMethod::QR;
        if (s == "gmres")
            return SolveMethod::Gmres;
        if (s == "auto")
            return SolveMethod::Auto;
        throw Error(ErrorCode::ConfigError, "unknown solver '" + s + "'");
    }

    namespace
    {
        const double* packed(const Eigen::SparseMatrix<cplx>& m)
        {
            return reinterpret_cast<const double*>(m.valuePtr());
        }

        std::string status_message(const char* what, int status)
        {
            std::ostringstream msg;
            msg << what << " failed with UMFPACK status " << status;
            return msg.str();
        }

        void check_residual(const Eigen::SparseMatrix<cplx>& m, const Eigen::VectorXcd& b, Solution& sol)
        {
            const double bn = b.norm();
            const double rn = (m * sol.coefficients - b).norm();
            sol.residual_norm = bn > 0.0 ? rn / bn : rn;
            if (sol.residual_norm > 1e-8)
            {
                std::ostringstream msg;
                msg << "relative residual " << sol.residual_norm << " above 1e-8";
                sol.warnings.push_back(msg.str());
            }
        }

        // Block-Jacobi preconditioner in the shape Eigen's iterative solvers expect.
        class BlockLUPreconditioner
        {
        public:
            using Scalar = cplx;
            using StorageIndex = Eigen::Index;
            enum
            {
                ColsAtCompileTime = Eigen::Dynamic,
                MaxColsAtCompileTime = Eigen::Dynamic
            };

            BlockLUPreconditioner() = default;

            void set_blocks(const BlockPartition* blocks) { blocks_ = blocks; }

            template <typename M>
            BlockLUPreconditioner& analyzePattern(const M&)
            {
                return *this;
            }

            template <typename M>
            BlockLUPreconditioner& factorize(const M& m)
            {
                return compute(m);
            }

            template <typename M>
            BlockLUPreconditioner& compute(const M& m)
            {
                lu_.clear();
                std::vector<int> local(static_cast<std::size_t>(m.rows()), -1);
                for (const auto& block : *blocks_)
                {
                    for (std::size_t i = 0; i < block.size(); ++i)
                        local[block[i]] = static_cast<int>(i);

                    std::vector<Eigen::Triplet<cplx>> entries;
                    for (std::size_t j = 0; j < block.size(); ++j)
                        for (typename M::InnerIterator it(m, block[j]); it; ++it)
                        {
                            const int r = local[it.row()];
                            if (r >= 0)
                                entries.emplace_back(r, static_cast<int>(j), it.value());
                        }
                    const auto size = static_cast<Eigen::Index>(block.size());
                    Eigen::SparseMatrix<cplx> sub(size, size);
                    sub.setFromTriplets(entries.begin(), entries.end());
                    lu_.push_back(std::make_unique<SparseLU>(sub));

                    for (int g : block)
                        local[g] = -1;
                }
                return *this;
            }

            Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const
            {
                Eigen::VectorXcd x(b.size());
                for (std::size_t k = 0; k < lu_.size(); ++k)
                {
                    const auto& block = (*blocks_)[k];
                    Eigen::VectorXcd local(static_cast<Eigen::Index>(block.size()));
                    for (std::size_t i = 0; i < block.size(); ++i)
                        local[i] = b[block[i]];
                    const Eigen::VectorXcd y = lu_[k]->solve(local);
                    for (std::size_t i = 0; i < block.size(); ++i)
                        x[block[i]] = y[i];
                }
                return x;
            }

            Eigen::ComputationInfo info() const { return Eigen::Success; }

        private:
            const BlockPartition* blocks_ = nullptr;
            std::vector<std::unique_ptr<SparseLU>> lu_;
        };

        BlockPartition contiguous_partition(Eigen::Index n, int parts)
        {
            BlockPartition blocks(static_cast<std::size_t>(parts));
            for (Eigen::Index i = 0; i < n; ++i)
                blocks[static_cast<std::size_t>(i * parts / n)].push_back(static_cast<int>(i));
            return blocks;
        }
    }

    BlockPartition slab_partition(const std::vector<Vec3>& centroids, std::size_t per_element, int slabs)
    {
        const std::size_t ne = centroids.size();
        if (slabs < 1 || ne == 0)
            throw Error(ErrorCode::ConfigError, "slab partition needs at least one slab and one element");
        slabs = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(slabs), ne));

        Vec3 lo = centroids[0];
        Vec3 hi = centroids[0];
        for (const Vec3& c : centroids)
        {
            lo = lo.cwiseMin(c);
            hi = hi.cwiseMax(c);
        }
        Eigen::Index axis = 0;
        (hi - lo).maxCoeff(&axis);

        std::vector<std::size_t> order(ne);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return centroids[a][axis] < centroids[b][axis];
        });

        BlockPartition blocks(static_cast<std::size_t>(slabs));
        for (std::size_t i = 0; i < ne; ++i)
        {
            auto& block = blocks[i * static_cast<std::size_t>(slabs) / ne];
            for (std::size_t q = 0; q < per_element; ++q)
                block.push_back(static_cast<int>(order[i] * per_element + q));
        }
        for (auto& block : blocks)
            std::sort(block.begin(), block.end());
        return blocks;
    }

    Solution solve_gmres(const Eigen::SparseMatrix<cplx>& m, const Eigen::VectorXcd& b, const BlockPartition& blocks,
                         const IterativeOptions& options)
    {
        if (m.rows() != m.cols() || m.rows() != b.size() || m.rows() == 0)
            throw Error(ErrorCode::ConfigError, "solver needs a nonempty square system");
        std::vector<char> seen(static_cast<std::size_t>(m.rows()), 0);
        for (const auto& block : blocks)
            for (int g : block)
            {
                if (g < 0 || g >= m.rows() || seen[g])
                    throw Error(ErrorCode::ConfigError, "block partition must cover each unknown exactly once");
                seen[g] = 1;
            }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw Error(ErrorCode::ConfigError, "block partition must cover each unknown exactly once");

        Eigen::GMRES<Eigen::SparseMatrix<cplx>, BlockLUPreconditioner> gmres;
        gmres.preconditioner().set_blocks(&blocks);
        gmres.set_restart(options.restart);
        gmres.setTolerance(options.tolerance);
        gmres.setMaxIterations(options.max_iterations);
        gmres.compute(m);

        Solution sol;
        sol.coefficients = gmres.solve(b);
        sol.iterations = static_cast<int>(gmres.iterations());
        if (!sol.coefficients.allFinite())
            throw Error(ErrorCode::SingularSystem, "GMRES produced non-finite values");
        check_residual(m, b, sol);
        if (sol.residual_norm > 1e-8)
        {
            std::ostringstream msg;
            msg << "GMRES stopped after " << sol.iterations << " iterations at relative residual "
                << sol.residual_norm;
            throw Error(ErrorCode::SingularSystem, msg.str());
        }
        return sol;
    }

    SparseLU::SparseLU(const Eigen::SparseMatrix<cplx>& m) : m_(m)
    {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw Error(ErrorCode::ConfigError, "solver needs a nonempty square matrix");
        m_.makeCompressed();

        double control[UMFPACK_CONTROL];
        double info[UMFPACK_INFO];
        umfpack_zi_defaults(control);
        // nested dissection keeps the fill of these 3D block systems far
        // below the AMD default
        control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;

        const int n = static_cast<int>(m_.rows());
        void* symbolic = nullptr;
        int status = umfpack_zi_symbolic(n, n, m_.outerIndexPtr(), m_.innerIndexPtr(), packed(m_), nullptr,
                                         &symbolic, control, info);
        if (status != UMFPACK_OK)
        {
            umfpack_zi_free_symbolic(&symbolic);
            throw Error(ErrorCode::SingularSystem, status_message("symbolic analysis", status));
        }

        status = umfpack_zi_numeric(m_.outerIndexPtr(), m_.innerIndexPtr(), packed(m_), nullptr, symbolic,
                                    &numeric_, control, info);
        umfpack_zi_free_symbolic(&symbolic);

        pivot_ratio_ = info[UMFPACK_RCOND];
        if (status == UMFPACK_WARNING_singular_matrix || (status == UMFPACK_OK && !(pivot_ratio_ >= 1e-15)))
        {
            umfpack_zi_free_numeric(&numeric_);
            std::ostringstream msg;
            msg << "pivot ratio " << pivot_ratio_ << " below 1e-15";
            throw Error(ErrorCode::SingularSystem, msg.str());
        }
        if (status != UMFPACK_OK)
        {
            umfpack_zi_free_numeric(&numeric_);
            throw Error(ErrorCode::SingularSystem, status_message("numeric factorization", status));
        }
    }

    SparseLU::~SparseLU()
    {
        if (numeric_)
            umfpack_zi_free_numeric(&numeric_);
    }

    Eigen::VectorXcd SparseLU::run(int sys, const Eigen::VectorXcd& b) const
    {
        Eigen::VectorXcd x(b.size());
        double control[UMFPACK_CONTROL];
        double info[UMFPACK_INFO];
        umfpack_zi_defaults(control);
        const int status = umfpack_zi_solve(sys, m_.outerIndexPtr(), m_.innerIndexPtr(), packed(m_), nullptr,
                                            reinterpret_cast<double*>(x.data()), nullptr,
                                            reinterpret_cast<const double*>(b.data()), nullptr, numeric_,
                                            control, info);
        if (status != UMFPACK_OK)
            throw Error(ErrorCode::SingularSystem, status_message("solve", status));
        return x;
    }

    Eigen::VectorXcd SparseLU::solve(const Eigen::VectorXcd& b) const
    {
        return run(UMFPACK_A, b);
    }

    Eigen::VectorXcd SparseLU::solve_adjoint(const Eigen::VectorXcd& b) const
    {
        return run(UMFPACK_At, b);
    }

    double SparseLU::condition_estimate() const
    {
        const Eigen::Index n = m_.rows();

        double norm1 = 0.0;
        for (Eigen::Index c = 0; c < m_.outerSize(); ++c)
        {
            double col = 0.0;
            for (Eigen::SparseMatrix<cplx>::InnerIterator it(m_, c); it; ++it)
                col += std::abs(it.value());
            norm1 = std::max(norm1, col);
        }

        auto sign = [](const Eigen::VectorXcd& y) {
            Eigen::VectorXcd s(y.size());
            for (Eigen::Index i = 0; i < y.size(); ++i)
                s[i] = std::abs(y[i]) > 0.0 ? y[i] / std::abs(y[i]) : cplx(1.0);
            return s;
        };

        Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, 1.0 / static_cast<double>(n));
        Eigen::VectorXcd y = solve(x);
        double est = y.lpNorm<1>();
        Eigen::VectorXcd z = solve_adjoint(sign(y));

        for (int iter = 0; iter < 5; ++iter)
        {
            Eigen::Index j = 0;
            z.cwiseAbs().maxCoeff(&j);
            if (iter > 0 && std::abs(z[j]) <= std::real(x.dot(z)))
                break;
            x.setZero();
            x[j] = 1.0;
            y = solve(x);
            const double next = y.lpNorm<1>();
            if (next <= est)
                break;
            est = next;
            z = solve_adjoint(sign(y));
        }

        // alternating-sign safeguard
        Eigen::VectorXcd alt(n);
        for (Eigen::Index i = 0; i < n; ++i)
            alt[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + (n > 1 ? static_cast<double>(i) / (n - 1) : 0.0));
        est = std::max(est, 2.0 * solve(alt).lpNorm<1>() / (3.0 * static_cast<double>(n)));

        return norm1 * est;
    }

    Solution solve(const Eigen::SparseMatrix<cplx>& m, const Eigen::VectorXcd& b, SolveMethod method,
                   bool estimate_condition)
    {
        if (m.rows() != b.size())
            throw Error(ErrorCode::ConfigError, "matrix and right-hand side sizes differ");

        if (method == SolveMethod::Gmres)
        {
            const auto parts = static_cast<int>(std::max<Eigen::Index>(1, (m.rows() + 39999) / 40000));
            return solve_gmres(m, b, contiguous_partition(m.rows(), parts));
        }

        Solution sol;
        if (method == SolveMethod::DirectLU || method == SolveMethod::Auto)
        {
            SparseLU lu(m);
            sol.coefficients = lu.solve(b);
            if (estimate_condition)
            {
                sol.cond_estimate = lu.condition_estimate();
                if (*sol.cond_estimate > 1e14)
                {
                    std::ostringstream msg;
                    msg << "IllConditioned: condition estimate " << *sol.cond_estimate;
                    sol.warnings.push_back(msg.str());
                }
            }
        }
        else
        {
            Eigen::SparseMatrix<cplx> a = m;
            a.makeCompressed();
            Eigen::SparseQR<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> qr(a);
            if (qr.info() != Eigen::Success)
                throw Error(ErrorCode::SingularSystem, "sparse QR factorization failed");
            if (qr.rank() < a.cols())
                throw Error(ErrorCode::SingularSystem, "sparse QR found rank " + std::to_string(qr.rank()));
            sol.coefficients = qr.solve(b);
        }

        check_residual(m, b, sol);
        return sol;
    }
}
