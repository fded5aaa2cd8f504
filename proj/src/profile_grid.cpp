#include "conical/profile_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace conical {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void run_fft(std::vector<cplx>& v, int d, int n, int sign) {
    auto* data = reinterpret_cast<fftw_complex*>(v.data());
    fftw_plan plan = d == 1
        ? fftw_plan_dft_1d(n, data, data, sign, FFTW_ESTIMATE)
        : fftw_plan_dft_2d(n, n, data, data, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

}  // namespace

ProfileGrid::ProfileGrid(int d, int n, double L) : d_(d), n_(n), L_(L) {
    if (d < 1 || d > 2) throw step_error("profile grid supports d in {1,2}");
    if (!power_of_two(n)) throw step_error("profile grid size must be a power of two");
    values_.assign(d == 1 ? n : static_cast<std::size_t>(n) * n, cplx(0, 0));
}

ProfileGrid ProfileGrid::sample(int d, int n, double L,
                                const std::function<cplx(const Vec&)>& f) {
    ProfileGrid g(d, n, L);
    for (std::size_t k = 0; k < g.size(); ++k) g.values_[k] = f(g.point(k));
    return g;
}

ProfileGrid ProfileGrid::gaussian(int d, int n, double L) {
    const double norm = std::pow(pi, -0.25 * d);
    return sample(d, n, L, [norm](const Vec& y) {
        return cplx(norm * std::exp(-0.5 * y.squaredNorm()), 0.0);
    });
}

double ProfileGrid::cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < d_; ++i) v *= spacing();
    return v;
}

Vec ProfileGrid::point(std::size_t flat) const {
    Vec y(d_);
    if (d_ == 1) {
        y[0] = coord(static_cast<int>(flat));
    } else {
        y[0] = coord(static_cast<int>(flat / n_));
        y[1] = coord(static_cast<int>(flat % n_));
    }
    return y;
}

double ProfileGrid::mass() const {
    double s = 0.0;
    for (const auto& z : values_) s += std::norm(z);
    return s * cell_volume();
}

double ProfileGrid::l2_norm() const { return std::sqrt(mass()); }

double ProfileGrid::boundary_mass_fraction(int cells) const {
    double total = 0.0, edge = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        const double m = std::norm(values_[k]);
        total += m;
        bool near = false;
        if (d_ == 1) {
            const int i = static_cast<int>(k);
            near = i < cells || i >= n_ - cells;
        } else {
            const int i = static_cast<int>(k / n_), j = static_cast<int>(k % n_);
            near = i < cells || i >= n_ - cells || j < cells || j >= n_ - cells;
        }
        if (near) edge += m;
    }
    return total > 0 ? edge / total : 0.0;
}

void ProfileGrid::apply_phase(const std::function<double(const Vec&)>& phase) {
    for (std::size_t k = 0; k < values_.size(); ++k)
        values_[k] *= unit_phase(phase(point(k)));
}

void ProfileGrid::scale(cplx c) {
    for (auto& z : values_) z *= c;
}

void ProfileGrid::fft_forward() { run_fft(values_, d_, n_, FFTW_FORWARD); }

void ProfileGrid::fft_inverse() {
    run_fft(values_, d_, n_, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(size());
    for (auto& z : values_) z *= inv;
}

namespace {

cplx catmull_rom(const cplx* f, double t) {
    // f[-1], f[0], f[1], f[2] with t in [0,1) between f[0] and f[1]
    const cplx a = f[1] - f[0];
    const cplx b = 0.5 * (f[2] - f[0]);
    const cplx c = 0.5 * (f[1] - f[-1]);
    return f[0] + t * c + t * t * (3.0 * a - 2.0 * c - b) + t * t * t * (c + b - 2.0 * a);
}

}  // namespace

cplx ProfileGrid::interpolate(const Vec& y) const {
    const double h = spacing();
    auto locate = [&](double c, int& i0, double& t) -> bool {
        const double u = (c + L_) / h;
        i0 = static_cast<int>(std::floor(u));
        t = u - i0;
        return i0 >= 1 && i0 + 2 < n_;
    };
    if (d_ == 1) {
        int i0; double t;
        if (!locate(y[0], i0, t)) return {0.0, 0.0};
        cplx f[4] = {values_[i0 - 1], values_[i0], values_[i0 + 1], values_[i0 + 2]};
        return catmull_rom(f + 1, t);
    }
    int i0, j0; double ti, tj;
    if (!locate(y[0], i0, ti) || !locate(y[1], j0, tj)) return {0.0, 0.0};
    cplx rows[4];
    for (int a = -1; a <= 2; ++a) {
        cplx f[4];
        for (int b = -1; b <= 2; ++b) f[b + 1] = values_[index(i0 + a, j0 + b)];
        rows[a + 1] = catmull_rom(f + 1, tj);
    }
    return catmull_rom(rows + 1, ti);
}

double ProfileGrid::sigma_norm(int k) const {
    if (k < 0 || k > 2) throw domain_error("sigma_norm implemented for k in {0,1,2}");
    double sup = l2_norm();
    if (k == 0) return sup;

    auto weighted_norm = [&](const std::vector<cplx>& v,
                             const std::function<double(const Vec&)>& wgt) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double f = wgt(point(i));
            s += f * f * std::norm(v[i]);
        }
        return std::sqrt(s * cell_volume());
    };
    auto deriv = [&](int axis, int order) {
        ProfileGrid g = *this;
        g.fft_forward();
        for (std::size_t i = 0; i < g.values_.size(); ++i) {
            int bin = g.d_ == 1 ? static_cast<int>(i)
                                : (axis == 0 ? static_cast<int>(i / n_)
                                             : static_cast<int>(i % n_));
            cplx fac = cplx(0.0, g.wavenumber(bin));
            cplx m = order == 1 ? fac : fac * fac;
            g.values_[i] *= m;
        }
        g.fft_inverse();
        return g;
    };

    // |a| + |b| <= k over monomial weights and spectral derivatives
    for (int ax = 0; ax < d_; ++ax) {
        sup = std::max(sup, weighted_norm(values_, [&](const Vec& y) { return y[ax]; }));
        sup = std::max(sup, deriv(ax, 1).l2_norm());
    }
    if (k == 2) {
        for (int ax = 0; ax < d_; ++ax) {
            sup = std::max(sup, weighted_norm(values_, [&](const Vec& y) { return y[ax] * y[ax]; }));
            sup = std::max(sup, deriv(ax, 2).l2_norm());
            ProfileGrid g1 = deriv(ax, 1);
            for (int bx = 0; bx < d_; ++bx)
                sup = std::max(sup, weighted_norm(g1.values_, [&](const Vec& y) { return y[bx]; }));
        }
        if (d_ == 2) {
            sup = std::max(sup, weighted_norm(values_, [&](const Vec& y) { return y[0] * y[1]; }));
            ProfileGrid g01 = deriv(0, 1);
            g01 = [&] {  // d/dy1 of d/dy0
                ProfileGrid h = g01;
                h.fft_forward();
                for (std::size_t i = 0; i < h.values_.size(); ++i)
                    h.values_[i] *= cplx(0.0, h.wavenumber(static_cast<int>(i % n_)));
                h.fft_inverse();
                return h;
            }();
            sup = std::max(sup, g01.l2_norm());
        }
    }
    return sup;
}

double fold_phase(double phi) { return std::remainder(phi, 2.0 * pi); }

void ProfileGrid::export_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
    };
    if (d_ == 1)
        os << "y0,re,im\n";
    else
        os << "y0,y1,re,im\n";
    for (std::size_t k = 0; k < values_.size(); ++k) {
        const Vec y = point(k);
        for (int i = 0; i < d_; ++i) { put(y[i]); os << ","; }
        put(values_[k].real());
        os << ",";
        put(values_[k].imag());
        os << "\n";
    }
}

void ProfileGrid::export_bin(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    const double header[3] = {static_cast<double>(d_), static_cast<double>(n_), L_};
    os.write(reinterpret_cast<const char*>(header), sizeof header);
    for (const auto& z : values_) {
        const double pair[2] = {z.real(), z.imag()};
        os.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
}

ProfileGrid ProfileGrid::import_bin(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    double header[3];
    is.read(reinterpret_cast<char*>(header), sizeof header);
    ProfileGrid g(static_cast<int>(header[0]), static_cast<int>(header[1]), header[2]);
    for (auto& z : g.values_) {
        double pair[2];
        is.read(reinterpret_cast<char*>(pair), sizeof pair);
        z = {pair[0], pair[1]};
    }
    if (!is) throw std::runtime_error("truncated profile dump: " + path);
    return g;
}

}  // namespace conical
