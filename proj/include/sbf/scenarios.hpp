#pragma once

#include "sbf/model.hpp"

#include <string_view>

namespace sbf {

// ---------------------------------------------------------------------------
// Inverted pendulum, x = [theta, theta_dot], xdot = [theta_dot, sin theta] + [0, 1] u.
//
//   wide   : h_s = pi - ||x||_100, one backup csat(K x) around the origin.
//   narrow : h_s = 1 - ||diag(1/pi, 1) x||_100, same single backup.
//   multi  : narrow safe set, backups around 0, +pi/2 and -pi/2.

enum class PendulumVariant { wide, narrow, multi };

PendulumVariant parse_pendulum_variant(std::string_view name);
std::string_view to_string(PendulumVariant v);

struct PendulumOptions
{
    // Adds -sin(theta_c) to the feedback of the off-origin backups so that
    // their centers are equilibria of the closed loop.
    bool gravity_feedforward = true;
    // Saturation of every backup; pendulum_csat() when unset.
    std::optional<CsatParams> saturation;
};

/// Saturation used by every pendulum backup: ubar = 1.5 and the C1 constants
/// for lambda = 0.2 (c1 = 0.18, c2 = 7.77, c3 = -10.08, c4 = 1.32 rounded).
CsatParams pendulum_csat();

Scenario build_pendulum_scenario(PendulumVariant variant, const PendulumOptions& options = {});

// ---------------------------------------------------------------------------
// Unicycle ground robot, x = [q_x, q_y, v, theta], u = [acceleration, turn rate].
// The safe set is a soft minimum over the inside of a wall and the outside of
// rounded-box obstacles, all expressed in terms of the point of interest
// r = q + d [cos theta, sin theta] and the speed v.

/// Outside of an obstacle: ||(ax (r_x - bx), ay (r_y - by), av (v - bv))||_p - c.
struct ObstacleShape
{
    double ax, ay, av;
    double bx, by, bv;
    double c, p;
};

/// Inside of the wall: c - ||(ax r_x, ay r_y, av (v - bv))||_p.
struct WallShape
{
    double ax, ay, av;
    double bv;
    double c, p;
};

struct UnicycleMap
{
    WallShape wall;
    std::vector<ObstacleShape> obstacles;
    double rho = 20; // sharpness of the soft minimum that joins the shapes
};

/// Six rounded boxes inside a 12 x 20 rectangle; speeds in [-1, 9] are safe.
UnicycleMap default_unicycle_map();

/// Obstacle of half extents (hx, hy) at (bx, by), scaled so q is in meters
/// along x. The speed term is made negligible for |v - 4| <= 5.
ObstacleShape rounded_box(double bx, double by, double hx, double hy, double p = 20);

struct UnicycleConfig
{
    UnicycleMap map = default_unicycle_map();
    Vector goal = Eigen::Vector2d(2.0, 4.5);
    double d = 1.0;           // point-of-interest offset
    double ubar1 = 4.0;       // |u1| bound
    double ubar2 = 1.0;       // |u2| bound
    double mu = -15.0;        // braking gain of the backup
    double speed_margin = 100; // h_b = h_s - speed_margin v^2 / ubar1
    double mu1 = 0.8;
    double mu2 = 0.8;
};

Scenario build_unicycle_scenario(const UnicycleConfig& config);

} // namespace sbf
