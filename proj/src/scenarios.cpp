#include "sbf/scenarios.hpp"

#include "sbf/softnum.hpp"

#include <memory>
#include <numbers>

namespace sbf {
namespace {

constexpr double kPi = std::numbers::pi;

const Eigen::RowVector2d kPendulumGain(-3.0, -3.0);

BackupPolicy pendulum_backup(std::string label, const Eigen::Vector2d& center, double feedforward,
                             QuadraticBarrier barrier, const CsatParams& sat)
{
    auto hb = std::make_shared<const QuadraticBarrier>(std::move(barrier));
    BackupPolicy b;
    b.label = std::move(label);
    b.control = [=](const Vector& x) {
        const double a = kPendulumGain.dot(x - center) + feedforward;
        return Vector::Constant(1, csat(a, sat));
    };
    b.barrier = [hb](const Vector& x) { return (*hb)(x); };
    b.barrier_gradient = [hb](const Vector& x) { return hb->gradient(x); };
    b.field_jacobian = [=](const Vector& x) {
        const double a = kPendulumGain.dot(x - center) + feedforward;
        const double s = csat_derivative(a, sat);
        Matrix J(2, 2);
        J << 0.0, 1.0, std::cos(x(0)) + s * kPendulumGain(0), s * kPendulumGain(1);
        return J;
    };
    return b;
}

} // namespace

PendulumVariant parse_pendulum_variant(std::string_view name)
{
    if (name == "wide")
        return PendulumVariant::wide;
    if (name == "narrow")
        return PendulumVariant::narrow;
    if (name == "multi")
        return PendulumVariant::multi;
    throw Error("unknown pendulum variant '" + std::string(name) + "' (expected wide, narrow or multi)");
}

std::string_view to_string(PendulumVariant v)
{
    switch (v) {
    case PendulumVariant::wide: return "wide";
    case PendulumVariant::narrow: return "narrow";
    case PendulumVariant::multi: return "multi";
    }
    return "?";
}

CsatParams pendulum_csat()
{
    return CsatParams::continuously_differentiable(1.5, 0.2);
}

Scenario build_pendulum_scenario(PendulumVariant variant, const PendulumOptions& options)
{
    SystemModel model;
    model.state_dim = 2;
    model.input_dim = 1;
    model.drift = [](const Vector& x) { return Vector(Eigen::Vector2d(x(1), std::sin(x(0)))); };
    model.input_map = [](const Vector&) { return Matrix(Eigen::Vector2d(0.0, 1.0)); };

    SafetySpec safety;
    if (variant == PendulumVariant::wide) {
        safety.value = [](const Vector& x) { return kPi - pnorm(x, 100.0); };
        safety.gradient = [](const Vector& x) { return RowVector(-pnorm_gradient(x, 100.0)); };
    } else {
        const Eigen::Vector2d scale(1 / kPi, 1.0);
        safety.value = [=](const Vector& x) {
            return 1 - pnorm(Vector(scale.cwiseProduct(x)), 100.0);
        };
        safety.gradient = [=](const Vector& x) {
            return RowVector(-pnorm_gradient(Vector(scale.cwiseProduct(x)), 100.0).cwiseProduct(scale.transpose()));
        };
    }

    const CsatParams sat = options.saturation.value_or(pendulum_csat());
    Matrix origin_weight(2, 2);
    origin_weight << 1.25, 0.25, 0.25, 0.25;
    std::vector<BackupPolicy> backups;
    backups.push_back(pendulum_backup("origin", Eigen::Vector2d::Zero(), 0.0,
                                      QuadraticBarrier{Vector::Zero(2), origin_weight, 0.07}, sat));
    if (variant == PendulumVariant::multi) {
        Matrix side_weight(2, 2);
        side_weight << 1.17, 0.17, 0.12, 0.22;
        for (double theta : {kPi / 2, -kPi / 2}) {
            const Eigen::Vector2d center(theta, 0.0);
            const double ff = options.gravity_feedforward ? -std::sin(theta) : 0.0;
            backups.push_back(pendulum_backup(theta > 0 ? "plus_half_pi" : "minus_half_pi", center, ff,
                                              QuadraticBarrier{center, side_weight, 0.025}, sat));
        }
    }

    Scenario s{
        .name = "pendulum_" + std::string(to_string(variant)),
        .model = std::move(model),
        .polytope = ControlPolytope::box(Vector::Constant(1, -1.5), Vector::Constant(1, 1.5)),
        .safety = std::move(safety),
        .backups = std::move(backups),
        .desired = [](const Vector&) { return Vector(Vector::Zero(1)); },
        .box = SampleBox{Eigen::Vector2d(-kPi, -3.0), Eigen::Vector2d(kPi, 3.0)},
        .point_of_interest = {},
        .goal = std::nullopt,
    };
    return s;
}

// ---------------------------------------------------------------------------

ObstacleShape rounded_box(double bx, double by, double hx, double hy, double p)
{
    return ObstacleShape{.ax = 1.0, .ay = hx / hy, .av = 0.02, .bx = bx, .by = by, .bv = 4.0, .c = hx, .p = p};
}

UnicycleMap default_unicycle_map()
{
    UnicycleMap map;
    // q_w = 6 - ||(r_x, 0.6 r_y, 1.2 (v - 4))||_20: |r_x| <= 6, |r_y| <= 10, v in [-1, 9].
    map.wall = WallShape{.ax = 1.0, .ay = 0.6, .av = 1.2, .bv = 4.0, .c = 6.0, .p = 20};
    map.obstacles = {
        rounded_box(2.5, -6.0, 1.5, 1.0),
        rounded_box(-4.5, -4.0, 1.0, 1.5),
        rounded_box(1.8, -1.0, 1.0, 1.0),
        rounded_box(-2.0, 3.5, 1.0, 1.0),
        rounded_box(4.0, 7.0, 1.2, 1.2),
        rounded_box(-1.0, 7.5, 1.5, 0.8),
    };
    map.rho = 20;
    return map;
}

namespace {

struct UnicycleGeometry
{
    UnicycleMap map;
    double d;

    // (r_x, r_y, v) and its Jacobian with respect to the state.
    Eigen::Vector3d features(const Vector& x) const
    {
        return {x(0) + d * std::cos(x(3)), x(1) + d * std::sin(x(3)), x(2)};
    }

    Eigen::Matrix<double, 3, 4> features_jacobian(const Vector& x) const
    {
        Eigen::Matrix<double, 3, 4> J = Eigen::Matrix<double, 3, 4>::Zero();
        J(0, 0) = 1;
        J(1, 1) = 1;
        J(2, 2) = 1;
        J(0, 3) = -d * std::sin(x(3));
        J(1, 3) = d * std::cos(x(3));
        return J;
    }

    std::size_t shape_count() const { return map.obstacles.size() + 1; }

    // Shape values; optionally their gradients (one row per shape).
    Vector shapes(const Vector& x, Matrix* gradients) const
    {
        const Eigen::Vector3d r = features(x);
        Vector q(static_cast<Eigen::Index>(shape_count()));
        Eigen::Matrix<double, 3, 4> J;
        if (gradients) {
            J = features_jacobian(x);
            gradients->resize(q.size(), 4);
        }
        {
            const auto& w = map.wall;
            const Eigen::Vector3d a(w.ax, w.ay, w.av);
            const Eigen::Vector3d z = a.cwiseProduct(r - Eigen::Vector3d(0, 0, w.bv));
            q(0) = w.c - pnorm(z, w.p);
            if (gradients)
                gradients->row(0) = -(pnorm_gradient(z, w.p).cwiseProduct(a.transpose()) * J);
        }
        for (std::size_t i = 0; i < map.obstacles.size(); ++i) {
            const auto& o = map.obstacles[i];
            const Eigen::Vector3d a(o.ax, o.ay, o.av);
            const Eigen::Vector3d z = a.cwiseProduct(r - Eigen::Vector3d(o.bx, o.by, o.bv));
            const auto k = Eigen::Index(i + 1);
            q(k) = pnorm(z, o.p) - o.c;
            if (gradients)
                gradients->row(k) = pnorm_gradient(z, o.p).cwiseProduct(a.transpose()) * J;
        }
        return q;
    }

    double safety(const Vector& x) const { return softmin(shapes(x, nullptr), map.rho); }

    RowVector safety_gradient(const Vector& x) const
    {
        Matrix G;
        const Vector q = shapes(x, &G);
        return softmin_weights(q, map.rho).transpose() * G;
    }
};

void validate_shape(double ax, double ay, double av, double c, double p, const std::string& what)
{
    for (double v : {ax, ay, av, c, p})
        if (!(v > 0) || !std::isfinite(v))
            throw Error("unicycle map: " + what + " needs positive, finite a_x, a_y, a_v, c and p");
}

} // namespace

Scenario build_unicycle_scenario(const UnicycleConfig& cfg)
{
    if (cfg.map.obstacles.empty())
        throw Error("unicycle map: missing obstacle parameters");
    validate_shape(cfg.map.wall.ax, cfg.map.wall.ay, cfg.map.wall.av, cfg.map.wall.c, cfg.map.wall.p, "wall");
    for (std::size_t i = 0; i < cfg.map.obstacles.size(); ++i) {
        const auto& o = cfg.map.obstacles[i];
        validate_shape(o.ax, o.ay, o.av, o.c, o.p, "obstacle " + std::to_string(i + 1));
    }
    if (cfg.goal.size() != 2)
        throw Error("unicycle: goal must have two coordinates");
    if (!(cfg.map.rho > 0) || !(cfg.d > 0) || !(cfg.ubar1 > 0) || !(cfg.ubar2 > 0))
        throw Error("unicycle: rho, d, ubar1 and ubar2 must be positive");

    auto geo = std::make_shared<const UnicycleGeometry>(UnicycleGeometry{cfg.map, cfg.d});
    const double ubar1 = cfg.ubar1, ubar2 = cfg.ubar2, mu = cfg.mu, d = cfg.d;
    const double margin = cfg.speed_margin / cfg.ubar1;

    SystemModel model;
    model.state_dim = 4;
    model.input_dim = 2;
    model.drift = [](const Vector& x) {
        Vector f = Vector::Zero(4);
        f(0) = x(2) * std::cos(x(3));
        f(1) = x(2) * std::sin(x(3));
        return f;
    };
    model.input_map = [](const Vector&) {
        Matrix g = Matrix::Zero(4, 2);
        g(2, 0) = 1;
        g(3, 1) = 1;
        return g;
    };

    SafetySpec safety;
    safety.value = [geo](const Vector& x) { return geo->safety(x); };
    safety.gradient = [geo](const Vector& x) { return geo->safety_gradient(x); };

    BackupPolicy brake;
    brake.label = "brake";
    brake.control = [=](const Vector& x) { return Vector(Eigen::Vector2d(ubar1 * std::tanh(mu * x(2)), 0.0)); };
    brake.barrier = [=](const Vector& x) { return geo->safety(x) - margin * x(2) * x(2); };
    brake.barrier_gradient = [=](const Vector& x) {
        RowVector g = geo->safety_gradient(x);
        g(2) -= 2 * margin * x(2);
        return g;
    };
    brake.field_jacobian = [=](const Vector& x) {
        const double v = x(2), th = x(3);
        const double t = std::tanh(mu * v);
        Matrix J = Matrix::Zero(4, 4);
        J(0, 2) = std::cos(th);
        J(0, 3) = -v * std::sin(th);
        J(1, 2) = std::sin(th);
        J(1, 3) = v * std::cos(th);
        J(2, 2) = ubar1 * mu * (1 - t * t);
        return J;
    };

    const Eigen::Vector2d goal = cfg.goal;
    const double mu1 = cfg.mu1, mu2 = cfg.mu2;
    auto desired = [=](const Vector& x) {
        const double v = x(2), th = x(3);
        const Eigen::Vector2d r(x(0) + d * std::cos(th), x(1) + d * std::sin(th));
        Eigen::Matrix2d rot;
        rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
        const Eigen::Vector2d e = rot * (r - goal);
        const double vd = -(mu1 + mu2) * v - (1 + mu1 * mu2) * e(0) + mu1 * mu1 / d * e(1) * e(1);
        const double wd = -mu1 / d * e(1);
        return Vector(Eigen::Vector2d(ubar1 * std::tanh(vd), ubar2 * std::tanh(wd)));
    };

    const auto& w = cfg.map.wall;
    const double rx = w.c / w.ax + d, ry = w.c / w.ay + d;
    Scenario s{
        .name = "unicycle",
        .model = std::move(model),
        .polytope = ControlPolytope::box(Eigen::Vector2d(-ubar1, -ubar2), Eigen::Vector2d(ubar1, ubar2)),
        .safety = std::move(safety),
        .backups = {std::move(brake)},
        .desired = std::move(desired),
        .box = SampleBox{Eigen::Vector4d(-rx, -ry, -1.0, -kPi), Eigen::Vector4d(rx, ry, 9.0, kPi)},
        .point_of_interest = [d](const Vector& x) {
            return Vector(Eigen::Vector2d(x(0) + d * std::cos(x(3)), x(1) + d * std::sin(x(3))));
        },
        .goal = Vector(goal),
    };
    return s;
}

} // namespace sbf
