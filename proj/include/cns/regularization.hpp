#pragma once

#include "cns/grid.hpp"
#include "cns/model_config.hpp"

namespace cns {

/// Nondegenerate diffusivity C_D (n + eps)^(m-1).
double d_eps(double n, const ModelParams& p);

/// Saturation factor 1/(1 + eps n).
double f_eps(double n, double eps);

/// Interior cut-off rho_eps in [0,1], zero on the boundary-adjacent cells.
class CutoffField {
public:
    CutoffField() = default;
    CutoffField(const Grid& grid, std::vector<double> values, double width);
    /// rho == 1 everywhere (testing and cut-off-free experiments).
    static CutoffField ones(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    double operator[](std::size_t cell) const noexcept { return values_[cell]; }
    std::span<const double> values() const noexcept { return values_; }
    double width() const noexcept { return width_; }

private:
    Grid grid_;
    std::vector<double> values_;
    double width_ = 0.0;
};

/// Cubic smoothstep 3t^2 - 2t^3 of t = (d - h)/w, where d is the distance of
/// the cell centre to the boundary, h the largest spacing and w = eps * min
/// extent.
CutoffField rho_eps(const Grid& grid, double eps);

/// Face flux n_up F_eps(n_up) rho (S grad c) . e_axis with boundary faces zero.
/// The tangential gradient at a face averages the adjacent cell gradients;
/// S is evaluated at the face with the centred c. The upwind side is picked
/// from a first pass with centred n, then S is re-evaluated at the upwinded n.
/// rho on a face is the smaller of the two adjacent cell values.
VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, const SensitivitySpec& s,
                             const CutoffField& rho, const ModelParams& p);

/// Largest chemotactic face speed |rho (S grad c) . e_axis| (without n F_eps),
/// used for the explicit time-step bound.
double max_chemotactic_speed(const ScalarField& n, const ScalarField& c, const SensitivitySpec& s,
                             const CutoffField& rho, const ModelParams& p);

} // namespace cns
