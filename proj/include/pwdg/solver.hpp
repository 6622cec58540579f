#ifndef PWDG_SOLVER_HPP
#define PWDG_SOLVER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "pwdg/assembly.hpp"
#include "pwdg/types.hpp"

namespace pwdg
{
    enum class SolveMethod
    {
        DirectLU,
        QR,
        Gmres,  // block-Jacobi preconditioned GMRES
        Auto    // DirectLU up to a size limit, Gmres above it
    };

    SolveMethod parse_solve_method(const std::string& s);

    struct Solution
    {
        Eigen::VectorXcd coefficients;
        double residual_norm = 0.0;           // ||M c - b|| / ||b||
        std::optional<double> cond_estimate;  // 1-norm estimate (LU only)
        std::vector<std::string> warnings;    // e.g. IllConditioned
        int iterations = 0;                   // GMRES only
    };

    // Sparse LU of a complex matrix (UMFPACK). Owns the numeric factorization.
    class SparseLU
    {
    public:
        explicit SparseLU(const Eigen::SparseMatrix<cplx>& m);
        ~SparseLU();

        SparseLU(const SparseLU&) = delete;
        SparseLU& operator=(const SparseLU&) = delete;

        Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
        Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const;

        // min |U_ii| / max |U_ii|
        double pivot_ratio() const { return pivot_ratio_; }

        // Hager-Higham estimate of ||M||_1 ||M^{-1}||_1
        double condition_estimate() const;

    private:
        Eigen::VectorXcd run(int sys, const Eigen::VectorXcd& b) const;

        Eigen::SparseMatrix<cplx> m_;
        void* numeric_ = nullptr;
        double pivot_ratio_ = 0.0;
    };

    // Unknowns grouped into the diagonal blocks of a block-Jacobi preconditioner.
    using BlockPartition = std::vector<std::vector<int>>;

    // Elements sorted by centroid along the axis of largest extent and cut into
    // `slabs` groups of (nearly) equal size; each block lists the unknowns of
    // its elements, which are numbered element by element.
    BlockPartition slab_partition(const std::vector<Vec3>& centroids, std::size_t per_element, int slabs);

    struct IterativeOptions
    {
        int restart = 150;
        double tolerance = 1e-10;  // preconditioned relative residual
        int max_iterations = 5000;
    };

    // Restarted GMRES preconditioned by sparse LU factorizations of the
    // diagonal blocks. Far less memory than a global LU for large systems.
    // Throws SingularSystem if the true residual stays above 1e-8.
    Solution solve_gmres(const Eigen::SparseMatrix<cplx>& m, const Eigen::VectorXcd& b, const BlockPartition& blocks,
                         const IterativeOptions& options = {});

    // Gmres uses contiguous blocks of about 40000 unknowns here; Auto acts as
    // DirectLU (the size-based choice needs element geometry, see the study driver).
    Solution solve(const Eigen::SparseMatrix<cplx>& m, const Eigen::VectorXcd& b,
                   SolveMethod method = SolveMethod::DirectLU, bool estimate_condition = true);

    inline Solution solve(const GlobalSystem& sys, SolveMethod method = SolveMethod::DirectLU,
                          bool estimate_condition = true)
    {
        return solve(sys.matrix, sys.rhs, method, estimate_condition);
    }
}

#endif
