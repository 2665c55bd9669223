#pragma once

#include "cns/grid.hpp"

#include <memory>
#include <vector>

namespace cns {

/// Exact inverses of the constant-coefficient box stencils via real-to-real
/// FFTs (FFTW). Cell-centred Neumann problems diagonalise under DCT-II;
/// normal velocity faces under DST-I along the normal axis and DST-II along
/// the tangential axes (no-slip mirror closure).
///
/// Plans are built with FFTW_ESTIMATE so that results are bit-reproducible
/// from run to run.
class SpectralTransform {
public:
    enum class Kind { neumann_cells, dirichlet_faces };

    /// `axis` selects the velocity component for dirichlet_faces.
    SpectralTransform(const Grid& grid, Kind kind, int axis = 0);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    /// Solves (shift + scale * (-Laplacian)) x = rhs in place on the unknowns.
    /// For Neumann cells with shift == 0 the constant mode is projected out
    /// and the mean-zero solution returned.
    void solve(std::span<double> data, double shift, double scale);

    std::size_t size() const noexcept { return n_total_; }

private:
    struct Plans;
    std::unique_ptr<Plans> plans_;
    std::vector<double> eig_;  // eigenvalues of -Laplacian per mode
    std::vector<double> work_;
    std::size_t n_total_ = 0;
    double norm_ = 1.0;
};

/// Neumann scalar solver on cell fields.
class NeumannSolver {
public:
    explicit NeumannSolver(const Grid& grid) : grid_(grid), t_(grid, SpectralTransform::Kind::neumann_cells) {}
    /// Mean-zero x with laplacian_neumann(x) = rhs - mean(rhs).
    ScalarField poisson(const ScalarField& rhs);
    /// x with x - alpha * laplacian_neumann(x) = rhs.
    ScalarField helmholtz(const ScalarField& rhs, double alpha);

private:
    Grid grid_;
    SpectralTransform t_;
};

/// Componentwise (I - alpha * vector_laplacian)^{-1} with no-slip walls.
class VelocityHelmholtzSolver {
public:
    explicit VelocityHelmholtzSolver(const Grid& grid);
    VectorField solve(const VectorField& rhs, double alpha) { return solve(rhs, 1.0, alpha); }
    /// (shift - scale * vector_laplacian)^{-1}; shift may be 0 (no-slip makes
    /// the operator definite).
    VectorField solve(const VectorField& rhs, double shift, double scale);

private:
    Grid grid_;
    std::vector<std::unique_ptr<SpectralTransform>> t_;
    std::vector<double> scratch_;
};

} // namespace cns
