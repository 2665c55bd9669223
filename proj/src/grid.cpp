#include "cns/grid.hpp"

#include "cns/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cns {

Grid::Grid(int dim, std::array<int, 3> cells, std::array<double, 3> extents)
    : dim_(dim), cells_(cells), extents_(extents) {
    if (dim != 2 && dim != 3) throw ValidationError("grid dimension must be 2 or 3");
    if (dim == 2) {
        cells_[2] = 1;
        extents_[2] = 1.0;
    }
    for (int a = 0; a < dim_; ++a) {
        if (cells_[a] < 4) throw ValidationError("grid needs at least 4 cells per axis");
        if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a]))
            throw ValidationError("grid extents must be positive and finite");
    }
    volume_ = 1.0;
    for (int a = 0; a < 3; ++a) {
        h_[a] = extents_[a] / cells_[a];
        volume_ *= h_[a];
    }
}

double Grid::h_min() const noexcept {
    double m = h_[0];
    for (int a = 1; a < dim_; ++a) m = std::min(m, h_[a]);
    return m;
}

double Grid::domain_volume() const noexcept { return volume_ * static_cast<double>(num_cells()); }

std::size_t Grid::stride(int axis) const noexcept {
    if (axis == 0) return 1;
    if (axis == 1) return static_cast<std::size_t>(cells_[0]);
    return static_cast<std::size_t>(cells_[0]) * cells_[1];
}

std::array<int, 3> Grid::face_shape(int axis) const noexcept {
    auto s = cells_;
    s[axis] += 1;
    return s;
}

std::size_t Grid::num_faces(int axis) const noexcept {
    const auto s = face_shape(axis);
    return static_cast<std::size_t>(s[0]) * s[1] * s[2];
}

std::size_t Grid::face_index(int axis, int i, int j, int k) const noexcept {
    const auto s = face_shape(axis);
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(s[0]) * (j + static_cast<std::size_t>(s[1]) * k);
}

std::size_t Grid::face_stride(int axis, int along) const noexcept {
    const auto s = face_shape(axis);
    if (along == 0) return 1;
    if (along == 1) return static_cast<std::size_t>(s[0]);
    return static_cast<std::size_t>(s[0]) * s[1];
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw DomainError(std::string("shape mismatch in ") + what);
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), data_(grid.num_cells(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
    if (data_.size() != grid_.num_cells()) throw DomainError("scalar field data length does not match grid");
}

double ScalarField::min() const { return *std::min_element(data_.begin(), data_.end()); }
double ScalarField::max() const { return *std::max_element(data_.begin(), data_.end()); }

bool ScalarField::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
    require_same_grid(grid_, x.grid_, "ScalarField axpy");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

// ---------------------------------------------------------------------------

VectorField::VectorField(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid_.dim(); ++a) comp_[a].assign(grid_.num_faces(a), 0.0);
}

bool VectorField::is_boundary_face(int axis, int i, int j, int k) const noexcept {
    const int idx[3] = {i, j, k};
    return idx[axis] == 0 || idx[axis] == grid_.cells(axis);
}

void VectorField::set_face(int axis, int i, int j, int k, double v) {
    if (is_boundary_face(axis, i, j, k)) return;
    comp_[axis][grid_.face_index(axis, i, j, k)] = v;
}

void VectorField::enforce_walls(int axis) {
    const auto s = grid_.face_shape(axis);
    const int last = grid_.cells(axis);
    auto& c = comp_[axis];
    for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i) {
                const int idx[3] = {i, j, k};
                if (idx[axis] == 0 || idx[axis] == last) c[grid_.face_index(axis, i, j, k)] = 0.0;
            }
}

void VectorField::fill(const std::function<double(int, double, double, double)>& f) {
    for (int a = 0; a < grid_.dim(); ++a) {
        update(a, [&](std::span<double> c) {
            grid_.for_each_face(a, [&](int i, int j, int k, std::size_t idx) {
                double x[3] = {grid_.center(0, i), grid_.center(1, j), grid_.center(2, k)};
                const int id[3] = {i, j, k};
                x[a] = id[a] * grid_.h(a);
                c[idx] = f(a, x[0], x[1], x[2]);
            });
        });
    }
}

bool VectorField::all_finite() const {
    for (int a = 0; a < grid_.dim(); ++a)
        for (double v : comp_[a])
            if (!std::isfinite(v)) return false;
    return true;
}

double VectorField::max_abs() const {
    double m = 0.0;
    for (int a = 0; a < grid_.dim(); ++a)
        for (double v : comp_[a]) m = std::max(m, std::abs(v));
    return m;
}

VectorField& VectorField::operator+=(const VectorField& o) { return axpy(1.0, o); }
VectorField& VectorField::operator-=(const VectorField& o) { return axpy(-1.0, o); }

VectorField& VectorField::operator*=(double s) {
    for (int a = 0; a < grid_.dim(); ++a)
        update(a, [&](std::span<double> c) {
            for (auto& v : c) v *= s;
        });
    return *this;
}

VectorField& VectorField::axpy(double alpha, const VectorField& x) {
    require_same_grid(grid_, x.grid_, "VectorField axpy");
    for (int a = 0; a < grid_.dim(); ++a)
        update(a, [&](std::span<double> c) {
            const auto& xc = x.comp_[a];
            for (std::size_t i = 0; i < c.size(); ++i) c[i] += alpha * xc[i];
        });
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

// ---------------------------------------------------------------------------

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

double norm_lp(const ScalarField& f, double p) {
    if (!(p >= 1.0)) throw DomainError("norm_lp requires p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    if (p == 1.0) {
        for (double v : f.values()) s += std::abs(v);
        return s * f.grid().cell_volume();
    }
    if (p == 2.0) {
        for (double v : f.values()) s += v * v;
        return std::sqrt(s * f.grid().cell_volume());
    }
    for (double v : f.values()) s += std::pow(std::abs(v), p);
    return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double dot(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid(), "VectorField dot");
    double s = 0.0;
    for (int ax = 0; ax < a.dim(); ++ax) {
        const auto ca = a.component(ax);
        const auto cb = b.component(ax);
        for (std::size_t i = 0; i < ca.size(); ++i) s += ca[i] * cb[i];
    }
    return s * a.grid().cell_volume();
}

double norm_l2(const VectorField& v) { return std::sqrt(dot(v, v)); }

double dot(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "ScalarField dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid().cell_volume();
}

std::array<ScalarField, 3> face_to_center(const VectorField& v) {
    const Grid& g = v.grid();
    std::array<ScalarField, 3> out;
    for (int a = 0; a < g.dim(); ++a) {
        out[a] = ScalarField(g);
        const auto comp = v.component(a);
        const std::size_t fs = g.face_stride(a, a);
        g.for_each_cell([&](int i, int j, int k, std::size_t idx) {
            const std::size_t f = g.face_index(a, i, j, k);
            out[a][idx] = 0.5 * (comp[f] + comp[f + fs]);
        });
    }
    return out;
}

} // namespace cns
