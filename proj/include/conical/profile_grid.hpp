#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "conical/types.hpp"

namespace conical {

// Periodic uniform grid on [-L, L)^d, d in {1, 2}, n points per axis
// (power of two), complex amplitudes in row-major order.
class ProfileGrid {
public:
    ProfileGrid() = default;
    ProfileGrid(int d, int n, double L);

    static ProfileGrid sample(int d, int n, double L,
                              const std::function<cplx(const Vec&)>& f);
    // ground-state Gaussian pi^{-d/4} exp(-|y|^2/2)
    static ProfileGrid gaussian(int d, int n, double L);

    int dim() const { return d_; }
    int n() const { return n_; }
    double half_width() const { return L_; }
    double spacing() const { return 2.0 * L_ / n_; }
    double cell_volume() const;
    std::size_t size() const { return values_.size(); }

    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }

    double coord(int i) const { return -L_ + 2.0 * L_ * i / n_; }
    Vec point(std::size_t flat) const;
    std::size_t index(int i, int j = 0) const {
        return d_ == 1 ? static_cast<std::size_t>(i)
                       : static_cast<std::size_t>(i) * n_ + j;
    }
    // wavenumber for FFT bin i: (pi / L) * signed_index
    double wavenumber(int i) const {
        const int s = i <= n_ / 2 ? i : i - n_;
        return pi / L_ * s;
    }

    double l2_norm() const;
    double mass() const;  // squared L2 norm
    // fraction of |u|^2 within `cells` of the boundary
    double boundary_mass_fraction(int cells = 2) const;

    // pointwise multiply by exp(i phase(y))
    void apply_phase(const std::function<double(const Vec&)>& phase);
    void scale(cplx c);

    void fft_forward();   // unnormalized
    void fft_inverse();   // divides by size

    // Catmull-Rom interpolation; zero outside the grid support.
    cplx interpolate(const Vec& y) const;

    // sup over |a|+|b| <= k of ||y^a d^b u||_{L2}; spectral derivatives
    double sigma_norm(int k) const;

    void export_csv(const std::string& path) const;
    void export_bin(const std::string& path) const;
    static ProfileGrid import_bin(const std::string& path);

private:
    int d_ = 1;
    int n_ = 0;
    double L_ = 0.0;
    std::vector<cplx> values_;
};

// fold into (-pi, pi] before exponentiation
double fold_phase(double phi);
inline cplx unit_phase(double phi) {
    const double f = fold_phase(phi);
    return {std::cos(f), std::sin(f)};
}

}  // namespace conical
