#include "conical/profile.hpp"

#include <cmath>

namespace conical {

Mat gamma0_matrix(const CrossingEvent& event, const PauliPotential& pot) {
    const Mat J = pot.dw(event.z_flat.q);
    const Mat2 P = Mat2::Identity() - event.e_theta * event.e_theta.transpose();
    return J.transpose() * P * J / event.r;
}

Mat gamma1_matrix(const CrossingEvent& event, const PauliPotential& pot) {
    const Mat J = pot.dw(event.z_flat.q);
    const Vec a = J.transpose() * event.e_theta;
    return a * a.transpose() / event.r;
}

HessianExpansion hessian_expansion(const PauliPotential& pot, const CrossingEvent& event,
                                   Mode mode, double t) {
    const double a = event.alpha, r = event.r;
    const double dt = t - event.t_flat;
    const double den2 = a * a + r * r * dt * dt;
    if (den2 <= 0.0)
        throw singular_time_error("hessian expansion singular at t_flat with alpha = 0");
    const double den = std::sqrt(den2);
    const double s = static_cast<double>(mode_sign(mode));

    HessianExpansion out;
    out.gamma0 = gamma0_matrix(event, pot);
    out.gamma1 = gamma1_matrix(event, pot);
    out.gamma_alpha = out.gamma0 + (a * a / den2) * out.gamma1;
    out.g_scalar = r / den;

    const Vec& qb = event.z_flat.q;
    const Mat J = pot.dw(qb);
    const Vec Dth = J.transpose() * event.e_theta;
    const Vec Dpp = J.transpose() * event.e_theta_perp;
    const auto Hw = pot.hess_w(qb);
    const Vec2 wdir = a * event.e_theta_perp + r * dt * event.e_theta;

    Mat M = pot.hess_v(qb);
    M += s / den * (wdir[0] * Hw[0] + wdir[1] * Hw[1]);
    M -= s / (den2 * den) *
         (a * a * Dpp * Dpp.transpose() +
          r * a * dt * (Dpp * Dth.transpose() + Dth * Dpp.transpose()));
    out.M = M;
    return out;
}

double h_alpha(const CrossingEvent& event, double t) {
    const double a = event.alpha, r = event.r;
    const double adt = std::abs(t - event.t_flat);
    const double arg = r * adt + std::sqrt(a * a + r * r * adt * adt);
    if (arg <= 0.0)
        throw singular_time_error("h_alpha singular at t_flat with alpha = 0");
    return std::log(arg);
}

Mat phase_matrix_G(const CrossingEvent& event, const PauliPotential& pot, double t) {
    const double a = event.alpha, r = event.r;
    const double adt = std::abs(t - event.t_flat);
    const double den = std::sqrt(a * a + r * r * adt * adt);
    if (den <= 0.0)
        throw singular_time_error("G_alpha singular at t_flat with alpha = 0");
    return gamma0_matrix(event, pot) * h_alpha(event, t) +
           (r * adt / den) * gamma1_matrix(event, pot);
}

namespace {

struct Stepper {
    ProfileGrid u;
    std::vector<double> kin2;  // |k|^2 per flat index

    explicit Stepper(const ProfileGrid& init) : u(init) {
        kin2.resize(u.size());
        const int n = u.n();
        for (std::size_t f = 0; f < u.size(); ++f) {
            double k2;
            if (u.dim() == 1) {
                const double k = u.wavenumber(static_cast<int>(f));
                k2 = k * k;
            } else {
                const double ka = u.wavenumber(static_cast<int>(f) / n);
                const double kb = u.wavenumber(static_cast<int>(f) % n);
                k2 = ka * ka + kb * kb;
            }
            kin2[f] = k2;
        }
    }

    void kinetic(double tau) {
        u.fft_forward();
        auto& v = u.values();
        for (std::size_t f = 0; f < v.size(); ++f)
            v[f] *= unit_phase(-0.5 * kin2[f] * tau);
        u.fft_inverse();
    }

    void potential(const Mat& H, double tau) {
        auto& v = u.values();
        for (std::size_t f = 0; f < v.size(); ++f) {
            const Vec y = u.point(f);
            v[f] *= unit_phase(-0.5 * y.dot(H * y) * tau);
        }
    }
};

std::vector<double> build_time_grid(double t_init, double t_end, double dt,
                                    double t_flat, const ProfileSolveOptions& opt) {
    std::vector<double> ts{t_init};
    const double dir = t_end >= t_init ? 1.0 : -1.0;
    double t = t_init;
    const int guard = 20000000;
    for (int k = 0; k < guard && dir * (t_end - t) > 1e-15; ++k) {
        double step = dt;
        const double offset = std::abs(t - t_flat);
        const bool approaching = dir * (t_flat - t) > 0;
        if (approaching)
            step = std::min(step, std::max(opt.geometric_factor * offset,
                                           opt.geometric_factor * opt.min_offset));
        else
            step = std::min(step, std::max(opt.geometric_factor * offset, dt * 1e-3));
        step = std::min(step, dir * (t_end - t));
        t += dir * step;
        ts.push_back(t);
    }
    ts.back() = t_end;
    return ts;
}

ProfileSolution run_split_step(const std::function<Mat(double)>& hess,
                               const ProfileGrid& u_init, double t_init, double t_end,
                               double dt, double t_flat,
                               const ProfileSolveOptions& opt) {
    if (!(dt > 0.0)) throw step_error("profile step must be positive");
    Stepper st(u_init);
    ProfileSolution sol;
    sol.times = build_time_grid(t_init, t_end, dt, t_flat, opt);
    for (std::size_t k = 0; k + 1 < sol.times.size(); ++k) {
        const double a = sol.times[k], b = sol.times[k + 1];
        const double tau = b - a;
        st.kinetic(0.5 * tau);
        st.potential(hess(0.5 * (a + b)), tau);
        st.kinetic(0.5 * tau);
        if (opt.track_norms) sol.l2_norms.push_back(st.u.l2_norm());
        if (st.u.boundary_mass_fraction() > opt.boundary_tol)
            throw grid_overflow_error("profile reached the grid boundary");
    }
    sol.final = std::move(st.u);
    return sol;
}

}  // namespace

ProfileSolution solve_profile(const PauliPotential& pot, const CrossingEvent& event,
                              Mode mode, bool drifted, const ProfileGrid& u_init,
                              double t_init, double t_end, double dt,
                              const ProfileSolveOptions& opt) {
    // classical state advanced along with the profile; starts from the event
    PhasePoint z = event.z_flat;
    if (drifted) {
        const Vec delta = compute_drift(event, pot,
                                        mode == Mode::plus ? Mode::minus : Mode::plus);
        z.p += delta;
    }
    double z_time = event.t_flat;
    const FlowMode fm = to_flow(mode);
    auto advance_to = [&](double t) {
        const double span = t - z_time;
        if (span == 0.0) return;
        const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(span) / 1e-4)));
        const double h = span / sub;
        for (int i = 0; i < sub; ++i) {
            Vec p_half = z.p + 0.5 * h * flow_force(pot, z.q, fm);
            z.q += h * p_half;
            z.p = p_half + 0.5 * h * flow_force(pot, z.q, fm);
        }
        z_time = t;
    };
    auto hess = [&](double t) {
        advance_to(t);
        return hess_lambda(pot, z.q, mode);
    };
    return run_split_step(hess, u_init, t_init, t_end, dt, event.t_flat, opt);
}

ProfileSolution solve_profile_custom(const std::function<Mat(double)>& hess,
                                     const ProfileGrid& u_init, double t_init,
                                     double t_end, double dt,
                                     const ProfileSolveOptions& opt) {
    const double far = 2 * std::abs(t_end - t_init) + 1.0;
    return run_split_step(hess, u_init, t_init, t_end, dt, t_end + far, opt);
}

namespace {

ProfileGrid apply_G_phase(const ProfileGrid& u, const CrossingEvent& event,
                          const PauliPotential& pot, double t, double sign) {
    const Mat G = phase_matrix_G(event, pot, t);
    ProfileGrid out = u;
    out.apply_phase([&](const Vec& y) { return 0.5 * sign * y.dot(G * y); });
    return out;
}

}  // namespace

ProfileGrid extract_ingoing_profile(const ProfileGrid& u_at, const CrossingEvent& event,
                                    const PauliPotential& pot, Mode mode, double t) {
    return apply_G_phase(u_at, event, pot, t, mode == Mode::minus ? +1.0 : -1.0);
}

ProfileGrid extract_outgoing_profile(const ProfileGrid& u_at, const CrossingEvent& event,
                                     const PauliPotential& pot, Mode mode, double t) {
    return apply_G_phase(u_at, event, pot, t, mode == Mode::plus ? +1.0 : -1.0);
}

ProfileGrid seed_outgoing_profile(const ProfileGrid& u_out, const CrossingEvent& event,
                                  const PauliPotential& pot, Mode mode, double t_start) {
    if (!(t_start > event.t_flat))
        throw domain_error("outgoing seed requires t_start > t_flat");
    return apply_G_phase(u_out, event, pot, t_start, mode == Mode::plus ? -1.0 : +1.0);
}

}  // namespace conical
