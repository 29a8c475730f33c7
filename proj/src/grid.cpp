#include "slice/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "slice/error.hpp"

namespace slice {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionTooSmall: return "dimension-too-small";
        case ErrorKind::NonpositiveExtent: return "nonpositive-extent";
        case ErrorKind::ZOutOfRange: return "z-out-of-range";
        case ErrorKind::NoConvergence: return "no-convergence";
        case ErrorKind::NonpositiveDensity: return "nonpositive-density";
        case ErrorKind::NonpositiveTemperature: return "nonpositive-temperature";
        case ErrorKind::KindStateMismatch: return "kind-state-mismatch";
        case ErrorKind::NotVariational: return "not-variational";
        case ErrorKind::InvalidTimeStep: return "invalid-time-step";
        case ErrorKind::BlowUp: return "blow-up";
        case ErrorKind::MarkerEscape: return "marker-escape";
        case ErrorKind::SZero: return "s-zero";
        case ErrorKind::FZero: return "f-zero";
        case ErrorKind::NonpositiveExner: return "nonpositive-exner";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Grid make_grid(int nx, int nz, double L, double H) {
    if (nx < 4 || nz < 4)
        throw Error(ErrorKind::DimensionTooSmall,
                    "grid needs nx >= 4 and nz >= 4, got " + std::to_string(nx) + "x" + std::to_string(nz));
    if (!(L > 0.0) || !(H > 0.0)) throw Error(ErrorKind::NonpositiveExtent, "domain extents must be positive");
    Grid g;
    g.nx = nx;
    g.nz = nz;
    g.L = L;
    g.H = H;
    g.dx = L / nx;
    g.dz = H / (nz - 1);
    return g;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other.values_[n];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other.values_[n];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& other) {
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += a * other.values_[n];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField operator*(ScalarField a, const ScalarField& b) {
    for (std::size_t n = 0; n < a.size(); ++n) a[n] *= b[n];
    return a;
}

ScalarField operator/(ScalarField a, const ScalarField& b) {
    for (std::size_t n = 0; n < a.size(); ++n) a[n] /= b[n];
    return a;
}

double interp_bilinear(const ScalarField& field, double x, double z) {
    const Grid& g = field.grid();
    const double ztol = 1e-9 * g.H;
    if (!(z >= -ztol && z <= g.H + ztol))
        throw Error(ErrorKind::ZOutOfRange, "z = " + std::to_string(z) + " outside [0, H]");
    z = std::clamp(z, 0.0, g.H);

    double xs = std::fmod(x, g.L);
    if (xs < 0.0) xs += g.L;
    double fi = xs / g.dx;
    int i0 = static_cast<int>(std::floor(fi));
    double tx = fi - i0;
    i0 = g.wrap_i(i0);
    const int i1 = g.wrap_i(i0 + 1);

    double fk = z / g.dz;
    int k0 = std::min(static_cast<int>(std::floor(fk)), g.nz - 2);
    double tz = fk - k0;

    return (1 - tx) * (1 - tz) * field(i0, k0) + tx * (1 - tz) * field(i1, k0) +
           (1 - tx) * tz * field(i0, k0 + 1) + tx * tz * field(i1, k0 + 1);
}

namespace {

// Lagrange weights on nodes -1, 0, 1, 2 for t in [0, 1] (shifted by offset).
void cubic_weights(double t, double* w) {
    w[0] = -t * (t - 1) * (t - 2) / 6.0;
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2.0;
    w[2] = -(t + 1) * t * (t - 2) / 2.0;
    w[3] = (t + 1) * t * (t - 1) / 6.0;
}

}  // namespace

double interp_cubic(const ScalarField& field, double x, double z) {
    const Grid& g = field.grid();
    const double ztol = 1e-9 * g.H;
    if (!(z >= -ztol && z <= g.H + ztol))
        throw Error(ErrorKind::ZOutOfRange, "z = " + std::to_string(z) + " outside [0, H]");
    z = std::clamp(z, 0.0, g.H);

    double xs = std::fmod(x, g.L);
    if (xs < 0.0) xs += g.L;
    const double fi = xs / g.dx;
    const int i0 = static_cast<int>(std::floor(fi));
    double wx[4];
    cubic_weights(fi - i0, wx);

    // stencil k0-1..k0+2 kept inside the walls
    const double fk = z / g.dz;
    int k0 = std::min(static_cast<int>(std::floor(fk)), g.nz - 2);
    const int kb = std::clamp(k0 - 1, 0, g.nz - 4);
    double wz[4];
    cubic_weights(fk - (kb + 1), wz);

    double v = 0.0;
    for (int b = 0; b < 4; ++b) {
        double row = 0.0;
        for (int a = 0; a < 4; ++a) row += wx[a] * field(g.wrap_i(i0 - 1 + a), kb + b);
        v += wz[b] * row;
    }
    return v;
}

double quadrature_weight(const Grid& grid, int k) {
    const double w = grid.dx * grid.dz;
    return (k == 0 || k == grid.nz - 1) ? 0.5 * w : w;
}

double integral(const ScalarField& field) {
    const Grid& g = field.grid();
    double total = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        double row = 0.0;
        for (int i = 0; i < g.nx; ++i) row += field(i, k);
        total += quadrature_weight(g, k) * row;
    }
    return total;
}

double inner(const ScalarField& a, const ScalarField& b) {
    const Grid& g = a.grid();
    double total = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        double row = 0.0;
        for (int i = 0; i < g.nx; ++i) row += a(i, k) * b(i, k);
        total += quadrature_weight(g, k) * row;
    }
    return total;
}

double l2_norm(const ScalarField& a) { return std::sqrt(inner(a, a)); }

void write_snapshot(const std::string& path, const ScalarField& field, const std::string& name,
                    double time) {
    const Grid& g = field.grid();
    nlohmann::json header = {{"nx", g.nx}, {"nz", g.nz}, {"L", g.L}, {"H", g.H}, {"name", name}, {"time", time}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    out << header.dump() << '\n';
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.size() * sizeof(double)));
    if (!out) throw Error(ErrorKind::Io, "short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Io, path + ": bad snapshot header: " + e.what());
    }
    Grid g = make_grid(header.at("nx").get<int>(), header.at("nz").get<int>(), header.at("L").get<double>(),
                       header.at("H").get<double>());
    Snapshot snap{ScalarField(g), header.at("name").get<std::string>(), header.at("time").get<double>()};
    in.read(reinterpret_cast<char*>(snap.field.values().data()),
            static_cast<std::streamsize>(snap.field.size() * sizeof(double)));
    if (!in) throw Error(ErrorKind::Io, path + ": truncated snapshot payload");
    return snap;
}

}  // namespace slice
