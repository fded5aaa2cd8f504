#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "conical/types.hpp"

namespace conical {

// A(w) = [[w1, w2], [w2, -w1]]
inline Mat2 pauli_A(const Vec2& w) {
    Mat2 m;
    m << w[0], w[1], w[1], -w[0];
    return m;
}

// Matrix potential V(x) = v(x) I + A(w(x)) with user-supplied derivatives.
// dw is the 2 x d Jacobian of w; hess_w holds the Hessians of w1 and w2.
struct PauliPotential {
    int dim = 0;
    std::function<double(const Vec&)> v;
    std::function<Vec(const Vec&)> grad_v;
    std::function<Mat(const Vec&)> hess_v;
    std::function<Vec2(const Vec&)> w;
    std::function<Mat(const Vec&)> dw;  // 2 x d
    std::function<std::array<Mat, 2>(const Vec&)> hess_w;

    // |w(x)| <= crossing_tol(x) counts as "on the crossing set".
    static double crossing_tol(const Vec& x) { return 1e-12 * (1.0 + x.norm()); }
};

// Fills missing derivative callbacks by central differences, h = 1e-5 (1+|x|).
PauliPotential with_fd_derivatives(std::function<double(const Vec&)> v,
                                   std::function<Vec2(const Vec&)> w, int dim);

// Named potentials used by the CLI: "isotropic-linear", "shifted-linear",
// "quadratic-v".  param: alpha0 for shifted-linear, c for quadratic-v.
PauliPotential make_potential(const std::string& id, double param = 0.0, int dim = 2);

Mat2 eval_matrix(const PauliPotential& pot, const Vec& x);
std::pair<double, double> eigenvalues(const PauliPotential& pot, const Vec& x);
Mat2 projector(const PauliPotential& pot, const Vec& x, Mode mode);
Mat2 coupling_matrix_B(const PauliPotential& pot, const Vec& x, const Vec& xi, Mode mode);
double sigma_residual(const PauliPotential& pot, const PhasePoint& z);

double lambda_mode(const PauliPotential& pot, const Vec& x, Mode mode);
Vec grad_lambda(const PauliPotential& pot, const Vec& x, Mode mode);
Mat hess_lambda(const PauliPotential& pot, const Vec& x, Mode mode);

// Normalized eigenvector of V(x) for the given branch, sign fixed so that the
// first nonzero component (within tol) is positive.
Vec2 eigenvector(const PauliPotential& pot, const Vec& x, Mode mode);
Vec2 fix_sign(Vec2 v);

}  // namespace conical
