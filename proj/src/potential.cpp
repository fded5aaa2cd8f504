#include "conical/potential.hpp"

#include <cmath>

namespace conical {

namespace {

void check_finite(const Vec& x) {
    if (!x.allFinite()) throw evaluation_error("potential evaluated at non-finite point");
}

double fd_step(const Vec& x) { return 1e-5 * (1.0 + x.norm()); }

}  // namespace

PauliPotential with_fd_derivatives(std::function<double(const Vec&)> v,
                                   std::function<Vec2(const Vec&)> w, int dim) {
    PauliPotential pot;
    pot.dim = dim;
    pot.v = v;
    pot.w = w;
    pot.grad_v = [v, dim](const Vec& x) {
        const double h = fd_step(x);
        Vec g(dim);
        for (int i = 0; i < dim; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = (v(xp) - v(xm)) / (2 * h);
        }
        return g;
    };
    pot.hess_v = [v, dim](const Vec& x) {
        const double h = fd_step(x);
        Mat H(dim, dim);
        const double f0 = v(x);
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                Vec a = x, b = x, c = x, d = x;
                if (i == j) {
                    a[i] += h;
                    b[i] -= h;
                    H(i, i) = (v(a) - 2 * f0 + v(b)) / (h * h);
                } else {
                    a[i] += h; a[j] += h;
                    b[i] += h; b[j] -= h;
                    c[i] -= h; c[j] += h;
                    d[i] -= h; d[j] -= h;
                    H(i, j) = H(j, i) = (v(a) - v(b) - v(c) + v(d)) / (4 * h * h);
                }
            }
        }
        return H;
    };
    pot.dw = [w, dim](const Vec& x) {
        const double h = fd_step(x);
        Mat J(2, dim);
        for (int i = 0; i < dim; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            J.col(i) = (w(xp) - w(xm)) / (2 * h);
        }
        return J;
    };
    pot.hess_w = [w, dim](const Vec& x) {
        const double h = fd_step(x);
        std::array<Mat, 2> H{Mat(dim, dim), Mat(dim, dim)};
        const Vec2 f0 = w(x);
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                Vec2 val;
                if (i == j) {
                    Vec a = x, b = x;
                    a[i] += h;
                    b[i] -= h;
                    val = (w(a) - 2 * f0 + w(b)) / (h * h);
                } else {
                    Vec a = x, b = x, c = x, d = x;
                    a[i] += h; a[j] += h;
                    b[i] += h; b[j] -= h;
                    c[i] -= h; c[j] += h;
                    d[i] -= h; d[j] -= h;
                    val = (w(a) - w(b) - w(c) + w(d)) / (4 * h * h);
                }
                for (int k = 0; k < 2; ++k) H[k](i, j) = H[k](j, i) = val[k];
            }
        }
        return H;
    };
    return pot;
}

PauliPotential make_potential(const std::string& id, double param, int dim) {
    PauliPotential pot;
    pot.dim = dim;
    auto zero_v = [](const Vec&) { return 0.0; };
    auto zero_grad = [dim](const Vec&) { return Vec(Vec::Zero(dim)); };
    auto zero_hess = [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); };
    auto linear_w = [](const Vec& x) { return Vec2(x[0], x[1]); };
    auto linear_dw = [dim](const Vec&) {
        Mat J = Mat::Zero(2, dim);
        J(0, 0) = 1.0;
        J(1, 1) = 1.0;
        return J;
    };
    auto zero_hw = [dim](const Vec&) {
        return std::array<Mat, 2>{Mat::Zero(dim, dim), Mat::Zero(dim, dim)};
    };

    if (id == "isotropic-linear") {
        pot.v = zero_v;
        pot.grad_v = zero_grad;
        pot.hess_v = zero_hess;
        pot.w = linear_w;
        pot.dw = linear_dw;
        pot.hess_w = zero_hw;
    } else if (id == "shifted-linear") {
        const double a0 = param;
        pot.v = zero_v;
        pot.grad_v = zero_grad;
        pot.hess_v = zero_hess;
        pot.w = [a0](const Vec& x) { return Vec2(x[0], x[1] + a0); };
        pot.dw = linear_dw;
        pot.hess_w = zero_hw;
    } else if (id == "quadratic-v") {
        const double c = param;
        pot.v = [c](const Vec& x) { return 0.5 * c * x.squaredNorm(); };
        pot.grad_v = [c](const Vec& x) { return Vec(c * x); };
        pot.hess_v = [c, dim](const Vec&) { return Mat(c * Mat::Identity(dim, dim)); };
        pot.w = linear_w;
        pot.dw = linear_dw;
        pot.hess_w = zero_hw;
    } else {
        throw config_error("unknown potential id: " + id);
    }
    return pot;
}

Mat2 eval_matrix(const PauliPotential& pot, const Vec& x) {
    check_finite(x);
    const double vv = pot.v(x);
    const Vec2 ww = pot.w(x);
    if (!std::isfinite(vv) || !ww.allFinite())
        throw evaluation_error("non-finite potential value");
    return vv * Mat2::Identity() + pauli_A(ww);
}

std::pair<double, double> eigenvalues(const PauliPotential& pot, const Vec& x) {
    check_finite(x);
    const double vv = pot.v(x);
    const double g = pot.w(x).norm();
    return {vv - g, vv + g};
}

Mat2 projector(const PauliPotential& pot, const Vec& x, Mode mode) {
    const Vec2 ww = pot.w(x);
    const double g = ww.norm();
    if (g <= PauliPotential::crossing_tol(x))
        throw crossing_point_error("projector undefined on the crossing set");
    return 0.5 * (Mat2::Identity() + mode_sign(mode) / g * pauli_A(ww));
}

Mat2 coupling_matrix_B(const PauliPotential& pot, const Vec& x, const Vec& xi, Mode mode) {
    const Vec2 ww = pot.w(x);
    const double g = ww.norm();
    if (g <= PauliPotential::crossing_tol(x))
        throw crossing_point_error("coupling matrix undefined on the crossing set");
    // xi . grad Pi_+ = (1/2) A(m) by linearity of A, with
    // m = dw xi / |w| - w (w . dw xi) / |w|^3
    const Vec2 dwxi = pot.dw(x) * xi;
    const Vec2 m = dwxi / g - ww * (ww.dot(dwxi)) / (g * g * g);
    const Mat2 grad_part = 0.5 * pauli_A(m);
    const Mat2 pi_same = projector(pot, x, mode);
    const Mat2 pi_opp = projector(pot, x, other_mode(mode));
    return mode_sign(mode) * pi_opp * grad_part * pi_same;
}

double sigma_residual(const PauliPotential& pot, const PhasePoint& z) {
    return pot.w(z.q).dot(pot.dw(z.q) * z.p);
}

double lambda_mode(const PauliPotential& pot, const Vec& x, Mode mode) {
    return pot.v(x) + mode_sign(mode) * pot.w(x).norm();
}

Vec grad_lambda(const PauliPotential& pot, const Vec& x, Mode mode) {
    const Vec2 ww = pot.w(x);
    const double g = ww.norm();
    if (g <= PauliPotential::crossing_tol(x))
        throw gap_collapse_error("grad lambda undefined on the crossing set");
    return pot.grad_v(x) + mode_sign(mode) * (pot.dw(x).transpose() * ww) / g;
}

Mat hess_lambda(const PauliPotential& pot, const Vec& x, Mode mode) {
    const Vec2 ww = pot.w(x);
    const double g = ww.norm();
    if (g <= PauliPotential::crossing_tol(x))
        throw gap_collapse_error("hess lambda undefined on the crossing set");
    const Mat J = pot.dw(x);            // 2 x d
    const auto Hw = pot.hess_w(x);      // Hessians of w1, w2
    const Vec a = J.transpose() * ww;   // d-vector, (w . d_i w)
    Mat H = (J.transpose() * J + ww[0] * Hw[0] + ww[1] * Hw[1]) / g;
    H -= a * a.transpose() / (g * g * g);
    return pot.hess_v(x) + mode_sign(mode) * H;
}

Vec2 fix_sign(Vec2 v) {
    const double tol = 1e-12;
    if (v[0] < -tol || (std::abs(v[0]) <= tol && v[1] < 0)) return Vec2(-v);
    return v;
}

Vec2 eigenvector(const PauliPotential& pot, const Vec& x, Mode mode) {
    const Vec2 ww = pot.w(x);
    const double g = ww.norm();
    if (g <= PauliPotential::crossing_tol(x))
        throw crossing_point_error("eigenvector undefined on the crossing set");
    const double th = std::atan2(ww[1], ww[0]);
    Vec2 plus_vec(std::cos(0.5 * th), std::sin(0.5 * th));
    return fix_sign(mode == Mode::plus ? plus_vec : perp(plus_vec));
}

}  // namespace conical
