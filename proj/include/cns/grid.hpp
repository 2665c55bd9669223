#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cns {

/// Uniform axis-aligned box [0,L_x] x [0,L_y] (x [0,L_z]). Two-dimensional grids
/// keep nz = 1 with a unit z-extent so that cell volumes carry the 2D area.
class Grid {
public:
    Grid() = default;
    Grid(int dim, std::array<int, 3> cells, std::array<double, 3> extents);

    static Grid square(int n, double extent = 1.0) { return Grid(2, {n, n, 1}, {extent, extent, 1.0}); }
    static Grid cube(int n, double extent = 1.0) { return Grid(3, {n, n, n}, {extent, extent, extent}); }

    int dim() const noexcept { return dim_; }
    int cells(int axis) const noexcept { return cells_[axis]; }
    const std::array<int, 3>& cells() const noexcept { return cells_; }
    double extent(int axis) const noexcept { return extents_[axis]; }
    const std::array<double, 3>& extents() const noexcept { return extents_; }
    double h(int axis) const noexcept { return h_[axis]; }
    double h_min() const noexcept;
    double cell_volume() const noexcept { return volume_; }
    double domain_volume() const noexcept;

    std::size_t num_cells() const noexcept {
        return static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2];
    }
    std::size_t cell_index(int i, int j, int k) const noexcept {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) * (j + static_cast<std::size_t>(cells_[1]) * k);
    }
    /// Cell-index stride along `axis`.
    std::size_t stride(int axis) const noexcept;

    /// Shape of the face array holding the normal component along `axis`
    /// (one extra entry along that axis, boundary faces included).
    std::array<int, 3> face_shape(int axis) const noexcept;
    std::size_t num_faces(int axis) const noexcept;
    std::size_t face_index(int axis, int i, int j, int k) const noexcept;
    std::size_t face_stride(int axis, int along) const noexcept;

    /// Cell-centre coordinate of index `i` along `axis`.
    double center(int axis, int i) const noexcept { return (i + 0.5) * h_[axis]; }

    /// Visit every cell as (i, j, k, linear index).
    template <class F>
    void for_each_cell(F&& f) const {
        std::size_t idx = 0;
        for (int k = 0; k < cells_[2]; ++k)
            for (int j = 0; j < cells_[1]; ++j)
                for (int i = 0; i < cells_[0]; ++i, ++idx) f(i, j, k, idx);
    }

    /// Visit every face of the `axis` family, including boundary faces.
    template <class F>
    void for_each_face(int axis, F&& f) const {
        const auto s = face_shape(axis);
        std::size_t idx = 0;
        for (int k = 0; k < s[2]; ++k)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i, ++idx) f(i, j, k, idx);
    }

    bool operator==(const Grid&) const = default;

private:
    int dim_ = 2;
    std::array<int, 3> cells_{4, 4, 1};
    std::array<double, 3> extents_{1.0, 1.0, 1.0};
    std::array<double, 3> h_{0.25, 0.25, 1.0};
    double volume_ = 0.0625;
};

enum class ScalarBc { neumann_zero_flux };
enum class VectorBc { dirichlet_zero };

/// Cell-centred scalar with zero-flux Neumann closure.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0);
    ScalarField(const Grid& grid, std::vector<double> data);

    const Grid& grid() const noexcept { return grid_; }
    ScalarBc bc() const noexcept { return ScalarBc::neumann_zero_flux; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    double& at(int i, int j, int k = 0) noexcept { return data_[grid_.cell_index(i, j, k)]; }
    double at(int i, int j, int k = 0) const noexcept { return data_[grid_.cell_index(i, j, k)]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    double min() const;
    double max() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    /// this += a * x
    ScalarField& axpy(double a, const ScalarField& x);

private:
    Grid grid_;
    std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// MAC-staggered vector field: component `a` lives on the faces normal to
/// axis `a`. Boundary-normal faces are held at exactly zero through every
/// mutation pathway the class offers.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    VectorBc bc() const noexcept { return VectorBc::dirichlet_zero; }
    int dim() const noexcept { return grid_.dim(); }

    std::span<const double> component(int axis) const noexcept { return comp_[axis]; }
    double face(int axis, std::size_t idx) const noexcept { return comp_[axis][idx]; }
    double face(int axis, int i, int j, int k = 0) const noexcept {
        return comp_[axis][grid_.face_index(axis, i, j, k)];
    }

    /// Sets a face value; boundary-normal faces silently stay zero.
    void set_face(int axis, int i, int j, int k, double v);

    /// Gives `f` mutable access to one component, then re-imposes the wall
    /// condition. This is the only bulk write path.
    template <class F>
    void update(int axis, F&& f) {
        f(std::span<double>(comp_[axis]));
        enforce_walls(axis);
    }

    /// Fills every face of every component from f(axis, x, y, z).
    void fill(const std::function<double(int, double, double, double)>& f);

    bool is_boundary_face(int axis, int i, int j, int k) const noexcept;
    bool all_finite() const;
    /// Largest |normal component| over all faces.
    double max_abs() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
    VectorField& axpy(double a, const VectorField& x);

private:
    void enforce_walls(int axis);

    Grid grid_;
    std::array<std::vector<double>, 3> comp_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Discrete integral: sum of cell values times the cell volume.
double integrate(const ScalarField& f);

/// L^p norm on cells; p = infinity gives max |f|. Throws DomainError for p < 1.
double norm_lp(const ScalarField& f, double p);

/// Face inner product with the cell volume as control-volume weight; this is
/// the pairing under which gradient and -divergence are adjoint.
double dot(const VectorField& a, const VectorField& b);
double norm_l2(const VectorField& v);
double dot(const ScalarField& a, const ScalarField& b);

/// Average of the two adjacent face values per axis.
std::array<ScalarField, 3> face_to_center(const VectorField& v);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

} // namespace cns
