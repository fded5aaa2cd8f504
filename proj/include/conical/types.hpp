#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace conical {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;
using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

enum class Mode { minus, plus };

inline int mode_sign(Mode m) { return m == Mode::plus ? +1 : -1; }
inline Mode other_mode(Mode m) { return m == Mode::plus ? Mode::minus : Mode::plus; }
inline const char* mode_name(Mode m) { return m == Mode::plus ? "plus" : "minus"; }

// Flow selector: the two eigenvalue branches plus the v-only averaged flow.
enum class FlowMode { minus, plus, averaged };

inline FlowMode to_flow(Mode m) { return m == Mode::plus ? FlowMode::plus : FlowMode::minus; }

struct PhasePoint {
    Vec q;
    Vec p;
};

// rotate by +pi/2:  (v1, v2) -> (-v2, v1)
inline Vec2 perp(const Vec2& v) { return Vec2(-v[1], v[0]); }

struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct crossing_point_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct gap_collapse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct step_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct no_minimum_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct degenerate_crossing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct singular_time_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct grid_overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct box_escape_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct regime_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct tolerance_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct interpolation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace conical
