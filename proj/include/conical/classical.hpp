#pragma once

#include <optional>
#include <vector>

#include "conical/potential.hpp"
#include "conical/types.hpp"

namespace conical {

struct Trajectory {
    FlowMode mode = FlowMode::minus;
    bool drifted = false;
    std::vector<double> times;
    std::vector<PhasePoint> states;
    std::vector<double> action;          // cumulative from times.front()
    std::vector<Vec2> eigvec;            // empty unless transport requested
};

// Near-crossing passage data: dw(qb) pb = r e_theta, w(qb) = alpha e_theta_perp.
struct CrossingEvent {
    double t_flat = 0.0;
    PhasePoint z_flat;
    double r = 0.0;
    double theta = 0.0;
    double alpha = 0.0;
    Vec2 e_theta;
    Vec2 e_theta_perp;
    Vec2 V_theta;
    Vec2 V_theta_perp;
};

Vec flow_force(const PauliPotential& pot, const Vec& q, FlowMode mode);
double flow_hamiltonian(const PauliPotential& pot, const PhasePoint& z, FlowMode mode);

// Stoermer-Verlet flow integration with cumulative-Simpson action; optional
// eigenvector transport by RK4 (half-step states from a Verlet substep).
// dt > 0 is the nominal step; t_end < t_init integrates backwards.
Trajectory integrate_flow(const PauliPotential& pot, FlowMode mode, bool drifted,
                          const PhasePoint& z_init, double t_init, double t_end,
                          double dt, std::optional<Vec2> initial_eigvec = std::nullopt);

// Locates the interior minimum of J(t) = |w(q(t))| on the sampled trajectory,
// refines t_flat by a parabola on J^2 plus a secant polish on the root of
// J'(t) = sigma_residual, and assembles the crossing geometry.
CrossingEvent detect_crossing_event(const PauliPotential& pot, const Trajectory& traj);

// delta_p = -sign(from) (2 alpha / r) dw(qb)^T e_theta; p . delta = -sign 2 alpha.
Vec compute_drift(const CrossingEvent& event, const PauliPotential& pot, Mode from_mode);

struct TaylorState {
    Vec q;
    Vec p;
    double action_from_tflat;  // S(t; t_flat, z_flat)
};

// Closed-form expansions of Props on trajectories/actions, relative to a
// numerically integrated averaged flow.  Used as a test oracle.
TaylorState taylor_reference(const CrossingEvent& event, const PauliPotential& pot,
                             Mode mode, double t, bool drifted = false);

// Interpolated state on the stored grid (Verlet substep from nearest node).
PhasePoint state_at(const PauliPotential& pot, const Trajectory& traj, double t);

void export_trajectory_csv(const PauliPotential& pot, const Trajectory& traj,
                           const std::string& path);

}  // namespace conical
