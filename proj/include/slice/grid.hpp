#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace slice {

/// Uniform mesh on [0,L]x[0,H]. x is node-periodic (no duplicated column),
/// z includes both walls.
struct Grid {
    int nx = 0;
    int nz = 0;
    double L = 0.0;
    double H = 0.0;
    double dx = 0.0;
    double dz = 0.0;

    double x(int i) const { return i * dx; }
    double z(int k) const { return k * dz; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz); }
    std::size_t index(int i, int k) const {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }
    int wrap_i(int i) const { return ((i % nx) + nx) % nx; }

    bool operator==(const Grid&) const = default;
};

Grid make_grid(int nx, int nz, double L, double H);

/// Node values on a Grid, stored z-major / x-minor.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0)
        : grid_(grid), values_(grid.size(), value) {}

    template <class Fn>
    static ScalarField from_function(const Grid& grid, Fn&& fn) {
        ScalarField f(grid);
        for (int k = 0; k < grid.nz; ++k)
            for (int i = 0; i < grid.nx; ++i) f(i, k) = fn(grid.x(i), grid.z(k));
        return f;
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int i, int k) { return values_[grid_.index(i, k)]; }
    double operator()(int i, int k) const { return values_[grid_.index(i, k)]; }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool all_finite() const;
    double max_abs() const;
    double min() const;
    double max() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double a);
    /// this += a * other
    ScalarField& axpy(double a, const ScalarField& other);

    bool operator==(const ScalarField& other) const {
        return grid_ == other.grid_ && values_ == other.values_;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, const ScalarField& b);  // pointwise
ScalarField operator/(ScalarField a, const ScalarField& b);  // pointwise

/// Bilinear interpolation, periodic in x. Throws z-out-of-range outside [0,H].
double interp_bilinear(const ScalarField& field, double x, double z);

/// Tensor cubic Lagrange interpolation on a 4x4 stencil, periodic in x; the z
/// stencil is shifted inward next to the walls. Exact for cubics in x and z.
double interp_cubic(const ScalarField& field, double x, double z);

/// Trapezoidal quadrature: full weight in x, half weight on the wall rows.
double integral(const ScalarField& field);

/// Quadrature weight of node (i,k), including dx*dz.
double quadrature_weight(const Grid& grid, int k);

/// Weighted L2 inner product and norm using the quadrature weights.
double inner(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& a);

/// Snapshot file: one JSON header line {nx,nz,L,H,name,time} then raw
/// little-endian float64 values, z-major / x-minor.
void write_snapshot(const std::string& path, const ScalarField& field, const std::string& name,
                    double time);

struct Snapshot {
    ScalarField field;
    std::string name;
    double time = 0.0;
};

Snapshot read_snapshot(const std::string& path);

}  // namespace slice
