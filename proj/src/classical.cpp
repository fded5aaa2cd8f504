#include "conical/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace conical {

Vec flow_force(const PauliPotential& pot, const Vec& q, FlowMode mode) {
    switch (mode) {
        case FlowMode::averaged: return Vec(-pot.grad_v(q));
        case FlowMode::plus: return Vec(-grad_lambda(pot, q, Mode::plus));
        default: return Vec(-grad_lambda(pot, q, Mode::minus));
    }
}

double flow_hamiltonian(const PauliPotential& pot, const PhasePoint& z, FlowMode mode) {
    const double kin = 0.5 * z.p.squaredNorm();
    if (mode == FlowMode::averaged) return kin + pot.v(z.q);
    return kin + lambda_mode(pot, z.q, mode == FlowMode::plus ? Mode::plus : Mode::minus);
}

namespace {

void verlet_step(const PauliPotential& pot, FlowMode mode, PhasePoint& z, double h) {
    Vec p_half = z.p + 0.5 * h * flow_force(pot, z.q, mode);
    z.q += h * p_half;
    z.p = p_half + 0.5 * h * flow_force(pot, z.q, mode);
}

Mat2 transport_matrix(const PauliPotential& pot, const PhasePoint& z, Mode mode) {
    return coupling_matrix_B(pot, z.q, z.p, mode);
}

// RK4 step for Ydot = B(q(t), p(t)) Y, with the half-step state supplied.
Vec2 rk4_transport(const PauliPotential& pot, Mode mode, const Vec2& y,
                   const PhasePoint& z0, const PhasePoint& zh, const PhasePoint& z1,
                   double h) {
    const Mat2 B0 = transport_matrix(pot, z0, mode);
    const Mat2 Bh = transport_matrix(pot, zh, mode);
    const Mat2 B1 = transport_matrix(pot, z1, mode);
    const Vec2 k1 = B0 * y;
    const Vec2 k2 = Bh * (y + 0.5 * h * k1);
    const Vec2 k3 = Bh * (y + 0.5 * h * k2);
    const Vec2 k4 = B1 * (y + h * k3);
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace

Trajectory integrate_flow(const PauliPotential& pot, FlowMode mode, bool drifted,
                          const PhasePoint& z_init, double t_init, double t_end,
                          double dt, std::optional<Vec2> initial_eigvec) {
    if (!(dt > 0.0)) throw step_error("integration step must be positive");
    if (initial_eigvec && mode == FlowMode::averaged)
        throw step_error("eigenvector transport needs a signed mode");

    const double span = t_end - t_init;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt - 1e-12)));
    const double h = span / n;

    Trajectory traj;
    traj.mode = mode;
    traj.drifted = drifted;
    traj.times.reserve(n + 1);
    traj.states.reserve(n + 1);
    traj.action.assign(1, 0.0);

    const double h0 = flow_hamiltonian(pot, z_init, mode);
    auto integrand = [&](const PhasePoint& z) { return z.p.squaredNorm() - h0; };

    PhasePoint z = z_init;
    traj.times.push_back(t_init);
    traj.states.push_back(z);
    if (initial_eigvec) traj.eigvec.push_back(*initial_eigvec);

    std::vector<double> f;  // integrand samples at the nodes
    f.reserve(n + 1);
    f.push_back(integrand(z));

    for (int k = 0; k < n; ++k) {
        PhasePoint z_prev = z;
        PhasePoint z_half = z;
        verlet_step(pot, mode, z_half, 0.5 * h);
        verlet_step(pot, mode, z, h);
        if (!z.q.allFinite() || !z.p.allFinite())
            throw evaluation_error("flow integration diverged");
        if (mode != FlowMode::averaged &&
            pot.w(z.q).norm() <= PauliPotential::crossing_tol(z.q))
            throw gap_collapse_error("trajectory hit the crossing set");

        traj.times.push_back(t_init + (k + 1) * h);
        traj.states.push_back(z);
        f.push_back(integrand(z));
        if (initial_eigvec) {
            traj.eigvec.push_back(rk4_transport(
                pot, mode == FlowMode::plus ? Mode::plus : Mode::minus,
                traj.eigvec.back(), z_prev, z_half, z, h));
        }
    }

    // cumulative Simpson on the node samples
    traj.action.resize(n + 1);
    traj.action[0] = 0.0;
    for (int k = 1; k <= n; ++k) {
        if (k + 1 <= n) {
            traj.action[k] = traj.action[k - 1] +
                             (h / 12.0) * (5 * f[k - 1] + 8 * f[k] - f[k + 1]);
        } else if (k >= 2) {
            traj.action[k] = traj.action[k - 2] +
                             (h / 3.0) * (f[k - 2] + 4 * f[k - 1] + f[k]);
        } else {
            traj.action[k] = traj.action[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
        }
    }
    return traj;
}

PhasePoint state_at(const PauliPotential& pot, const Trajectory& traj, double t) {
    const auto& ts = traj.times;
    if (ts.empty()) throw step_error("empty trajectory");
    const bool fwd = ts.back() >= ts.front();
    auto within = [&](double a, double b) { return fwd ? (a <= b) : (a >= b); };
    if (!within(ts.front(), t) || !within(t, ts.back()))
        throw step_error("time outside trajectory span");
    // last node not past t in integration direction
    auto before = [&](double a, double b) { return fwd ? (a < b) : (a > b); };
    auto it = std::lower_bound(ts.begin(), ts.end(), t, before);
    size_t i = static_cast<size_t>(it - ts.begin());
    if (i == ts.size() || before(t, ts[i])) --i;
    PhasePoint z = traj.states[i];
    const double h = t - ts[i];
    if (std::abs(h) > 0) verlet_step(pot, traj.mode, z, h);
    return z;
}

CrossingEvent detect_crossing_event(const PauliPotential& pot, const Trajectory& traj) {
    const size_t n = traj.times.size();
    if (n < 3) throw no_minimum_error("trajectory too short to locate a gap minimum");

    std::vector<double> J2(n);
    for (size_t k = 0; k < n; ++k) J2[k] = pot.w(traj.states[k].q).squaredNorm();

    size_t imin = 1;
    for (size_t k = 1; k + 1 < n; ++k)
        if (J2[k] < J2[imin]) imin = k;
    if (J2[imin] > J2[imin - 1] || J2[imin] > J2[imin + 1] ||
        J2[imin] > J2.front() || J2[imin] > J2.back())
        throw no_minimum_error("gap function has no interior strict minimum");

    // parabola through the three samples around the discrete minimum
    const double t0 = traj.times[imin - 1], t1 = traj.times[imin], t2 = traj.times[imin + 1];
    const double f0 = J2[imin - 1], f1 = J2[imin], f2 = J2[imin + 1];
    const double denom = (f0 - 2 * f1 + f2);
    double tb = t1;
    if (std::abs(denom) > 0)
        tb = t1 + 0.5 * (t1 - t0) * (f0 - f2) / denom;
    tb = std::clamp(tb, std::min(t0, t2), std::max(t0, t2));

    // secant polish on sigma(t) = w . dw p, evaluated by substepping
    auto sigma_at = [&](double t) {
        PhasePoint z = state_at(pot, traj, t);
        return sigma_residual(pot, z);
    };
    double ta = tb - 0.5 * std::abs(t1 - t0), tc = tb + 0.5 * std::abs(t1 - t0);
    double fa = sigma_at(ta), fc = sigma_at(tc);
    for (int it = 0; it < 60 && std::abs(tc - ta) > 1e-15 * (1 + std::abs(tb)); ++it) {
        if (fc == fa) break;
        const double tn = tc - fc * (tc - ta) / (fc - fa);
        ta = tc;
        fa = fc;
        tc = tn;
        fc = sigma_at(tc);
        if (!std::isfinite(fc)) break;
    }
    if (std::isfinite(fc) && std::abs(tc - tb) < std::abs(t2 - t0)) tb = tc;

    CrossingEvent ev;
    ev.t_flat = tb;
    ev.z_flat = state_at(pot, traj, tb);
    const Vec2 dir = pot.dw(ev.z_flat.q) * ev.z_flat.p;
    ev.r = dir.norm();
    if (ev.r < 1e-10)
        throw degenerate_crossing_error("dw(qb) pb vanishes at the gap minimum");
    ev.e_theta = dir / ev.r;
    ev.theta = std::atan2(ev.e_theta[1], ev.e_theta[0]);
    ev.e_theta_perp = perp(ev.e_theta);
    ev.alpha = pot.w(ev.z_flat.q).norm();
    ev.V_theta = fix_sign(Vec2(std::cos(0.5 * ev.theta), std::sin(0.5 * ev.theta)));
    ev.V_theta_perp = perp(ev.V_theta);
    return ev;
}

Vec compute_drift(const CrossingEvent& event, const PauliPotential& pot, Mode from_mode) {
    const Mat J = pot.dw(event.z_flat.q);
    const Vec base = J.transpose() * event.e_theta;
    const double s = from_mode == Mode::minus ? -1.0 : +1.0;
    return Vec(s * (2.0 * event.alpha / event.r) * base);
}

namespace {

// definite integrals from 0 to x used by the expansions
double int_sqrt(double alpha, double r, double x) {
    // int_0^x sqrt(alpha^2 + r^2 s^2) ds
    const double rt = std::sqrt(alpha * alpha + r * r * x * x);
    double out = 0.5 * x * rt;
    if (alpha > 0) out += 0.5 * (alpha * alpha / r) * std::asinh(r * x / alpha);
    return out;
}

double argsh_term(double alpha, double r, double x) {
    // alpha * Argsh(r x / alpha), continuous limit 0 at alpha = 0
    if (alpha <= 0) return 0.0;
    return alpha * std::asinh(r * x / alpha);
}

struct AveragedState {
    Vec q;
    Vec p;
    double action;
};

AveragedState averaged_from_event(const PauliPotential& pot, const CrossingEvent& ev,
                                  double t) {
    const double span = t - ev.t_flat;
    if (span == 0.0) return {ev.z_flat.q, ev.z_flat.p, 0.0};
    const double dt = std::max(1e-6, std::abs(span) / 4000.0);
    Trajectory tr = integrate_flow(pot, FlowMode::averaged, false, ev.z_flat,
                                   ev.t_flat, t, dt);
    return {tr.states.back().q, tr.states.back().p, tr.action.back()};
}

}  // namespace

TaylorState taylor_reference(const CrossingEvent& event, const PauliPotential& pot,
                             Mode mode, double t, bool drifted) {
    const double a = event.alpha, r = event.r;
    const double dtb = t - event.t_flat;
    const double rt = std::sqrt(a * a + r * r * dtb * dtb);
    const Mat J = pot.dw(event.z_flat.q);
    const Vec Dth = J.transpose() * event.e_theta;
    const Vec Dpp = J.transpose() * event.e_theta_perp;
    const double s = static_cast<double>(mode_sign(mode));
    const double ash = argsh_term(a, r, dtb);  // alpha Argsh(r dt / alpha)

    const AveragedState avg = averaged_from_event(pot, event, t);

    TaylorState out;
    out.p = avg.p - s * (1.0 / r) * Dth * (rt - a) - s * (1.0 / r) * Dpp * ash;
    out.q = avg.q - s * (0.5 / r) * Dth * dtb * rt - s * (0.5 * a / (r * r)) * Dth * ash +
            s * (a / r) * Dth * dtb -
            s * Dpp * ((dtb / r) * ash - (a / (r * r)) * rt + (a * a / (r * r)));
    out.action_from_tflat =
        avg.action + s * a * dtb - s * dtb * rt - s * (a / r) * ash;

    if (drifted) {
        const Vec delta = compute_drift(event, pot, mode == Mode::plus ? Mode::minus : Mode::plus);
        // drifted flow for the mode generated FROM the other branch
        out.p += delta;
        out.q += delta * dtb;
        out.action_from_tflat += delta.dot(event.z_flat.p) * dtb;
    }
    return out;
}

void export_trajectory_csv(const PauliPotential& pot, const Trajectory& traj,
                           const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    const int d = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].q.size());
    os << "t";
    for (int i = 0; i < d; ++i) os << ",q" << i;
    for (int i = 0; i < d; ++i) os << ",p" << i;
    os << ",action,eigvec0,eigvec1,gap\n";
    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
    };
    for (size_t k = 0; k < traj.times.size(); ++k) {
        put(traj.times[k]);
        for (int i = 0; i < d; ++i) { os << ","; put(traj.states[k].q[i]); }
        for (int i = 0; i < d; ++i) { os << ","; put(traj.states[k].p[i]); }
        os << ",";
        put(traj.action[k]);
        os << ",";
        put(traj.eigvec.empty() ? 0.0 : traj.eigvec[k][0]);
        os << ",";
        put(traj.eigvec.empty() ? 0.0 : traj.eigvec[k][1]);
        os << ",";
        put(pot.w(traj.states[k].q).norm());
        os << "\n";
    }
}

}  // namespace conical
