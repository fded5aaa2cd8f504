#pragma once

#include "conical/classical.hpp"
#include "conical/profile_grid.hpp"

namespace conical {

// Hess lambda_pm(q_pm(t)) = M_pm(t) +- g_scalar(t) Gamma_alpha(t)
struct HessianExpansion {
    Mat M;
    Mat gamma_alpha;
    Mat gamma0;
    Mat gamma1;
    double g_scalar = 0.0;  // r / sqrt(alpha^2 + r^2 (t - tb)^2)
};

Mat gamma0_matrix(const CrossingEvent& event, const PauliPotential& pot);
// Gamma_1 = (1/r) (dw^T e_theta) (dw^T e_theta)^T, the rank-one piece with
// Gamma_alpha(t) = Gamma_0 + alpha^2 / (alpha^2 + r^2 (t-tb)^2) Gamma_1.
Mat gamma1_matrix(const CrossingEvent& event, const PauliPotential& pot);

HessianExpansion hessian_expansion(const PauliPotential& pot, const CrossingEvent& event,
                                   Mode mode, double t);

double h_alpha(const CrossingEvent& event, double t);
// G_alpha(t) = Gamma_0 h_alpha(t) + r|t-tb| / sqrt(alpha^2 + r^2(t-tb)^2) Gamma_1;
// sgn(t-tb) G_alpha is a primitive of g_alpha = g_scalar Gamma_alpha.
Mat phase_matrix_G(const CrossingEvent& event, const PauliPotential& pot, double t);

struct ProfileSolution {
    std::vector<double> times;
    ProfileGrid final;                 // u at times.back()
    std::vector<double> l2_norms;      // per accepted step
};

struct ProfileSolveOptions {
    double geometric_factor = 0.05;    // dt <= factor * |t - tb| near the crossing
    double min_offset = 1e-3;          // closest approach of the time grid to tb
    double boundary_tol = 1e-6;
    bool track_norms = false;
};

// Splitting solve of  i u_t = -1/2 Lap u + 1/2 Hess lambda_mode(q(t)) y.y u
// along the classical trajectory regenerated from the event.  Steps shrink
// geometrically near t_flat.
ProfileSolution solve_profile(const PauliPotential& pot, const CrossingEvent& event,
                              Mode mode, bool drifted, const ProfileGrid& u_init,
                              double t_init, double t_end, double dt,
                              const ProfileSolveOptions& opt = {});

// Test hook: same splitting with a caller-supplied Hessian H(t).
ProfileSolution solve_profile_custom(const std::function<Mat(double)>& hess,
                                     const ProfileGrid& u_init, double t_init,
                                     double t_end, double dt,
                                     const ProfileSolveOptions& opt = {});

// u_in extraction (t < tb):  u_-^in = e^{+i/2 G y.y} u_-(t),  u_+^in with -.
ProfileGrid extract_ingoing_profile(const ProfileGrid& u_at, const CrossingEvent& event,
                                    const PauliPotential& pot, Mode mode, double t);
// outgoing side (t > tb):  u_+^out = e^{+i/2 G y.y} u_+(t),  u_-^out with -.
ProfileGrid extract_outgoing_profile(const ProfileGrid& u_at, const CrossingEvent& event,
                                     const PauliPotential& pot, Mode mode, double t);
// inverse of the outgoing extraction: initial data for solve_profile past tb
ProfileGrid seed_outgoing_profile(const ProfileGrid& u_out, const CrossingEvent& event,
                                  const PauliPotential& pot, Mode mode, double t_start);

}  // namespace conical
