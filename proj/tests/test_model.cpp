#include "sbf/flow.hpp"
#include "sbf/io.hpp"
#include "sbf/oracles.hpp"
#include "sbf/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sbf;

namespace {

constexpr double kPi = std::numbers::pi;

// Two-decimal saturation constants, nominally for lambda = 0.3.
CsatParams rounded_csat()
{
    return CsatParams{.ubar = 1.5, .lambda = 0.3, .c1 = 0.18, .c2 = 7.77, .c3 = -10.08, .c4 = 1.32};
}

std::vector<Scenario> all_scenarios()
{
    std::vector<Scenario> out;
    for (auto v : {PendulumVariant::wide, PendulumVariant::narrow, PendulumVariant::multi})
        out.push_back(build_pendulum_scenario(v));
    out.push_back(build_unicycle_scenario(UnicycleConfig{}));
    return out;
}

Vector sample(std::mt19937_64& rng, const SampleBox& box)
{
    Vector x(box.lower.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = std::uniform_real_distribution<double>(box.lower(i), box.upper(i))(rng);
    return x;
}

} // namespace

TEST_CASE("csat branches")
{
    const CsatParams p = pendulum_csat();
    CHECK(csat(0.0, p) == 0.0);
    CHECK(csat(0.4, p) == 0.4);
    CHECK(csat(2.0, p) == 1.5);
    CHECK(csat(-2.0, p) == -1.5);
    for (double a = -3; a <= 3; a += 0.01) {
        CHECK(std::abs(csat(a, p)) <= 1.5);
        CHECK(csat(-a, p) == doctest::Approx(-csat(a, p)).epsilon(1e-14));
    }
}

TEST_CASE("csat sine branch with the rounded constants")
{
    const CsatParams p = rounded_csat();
    CHECK(csat(1.2, p) == 0.18 * std::sin(7.77 * 1.2 - 10.08) + 1.32);
    // These constants match the crest at ubar but not the inner joint
    // ubar (1 - lambda) = 1.05; the jump there is about 0.10.
    CHECK(std::abs(csat(1.5, p) - 1.5) < 1e-2);
    CHECK(std::abs(csat(1.05 + 1e-12, p) - 1.05) > 1e-2);
}

TEST_CASE("the rounded constants match the C1 constants for lambda = 0.2")
{
    const CsatParams p = CsatParams::continuously_differentiable(1.5, 0.2);
    CHECK(p.c1 == doctest::Approx(0.18).epsilon(0.02));
    CHECK(p.c2 == doctest::Approx(7.77).epsilon(0.01));
    CHECK(p.c3 == doctest::Approx(-10.08).epsilon(0.01));
    CHECK(p.c4 == doctest::Approx(1.32).epsilon(0.01));
    // Value and slope continuity at both joints.
    for (double joint : {1.2, 1.5}) {
        CHECK(std::abs(csat(joint + 1e-9, p) - csat(joint - 1e-9, p)) < 1e-8);
        CHECK(csat_derivative(joint + 1e-9, p) == doctest::Approx(csat_derivative(joint - 1e-9, p)).epsilon(1e-6));
    }
    // The rounded constants are continuous at 1.2 within 1e-2.
    const CsatParams rounded{.ubar = 1.5, .lambda = 0.2, .c1 = 0.18, .c2 = 7.77, .c3 = -10.08, .c4 = 1.32};
    CHECK(std::abs(csat(1.2 + 1e-12, rounded) - 1.2) < 1e-2);
}

TEST_CASE("csat difference quotients stay bounded across the joints")
{
    const CsatParams p = pendulum_csat();
    const double L = std::max(std::abs(p.c1 * p.c2), 1.0);
    const double delta = 1e-6;
    for (double a = -2; a <= 2; a += 1e-3) {
        CHECK(std::abs(csat(a + delta, p) - csat(a, p)) <= L * delta * (1 + 1e-9));
        const double fd = (csat(a + 1e-7, p) - csat(a - 1e-7, p)) / 2e-7;
        CHECK(csat_derivative(a, p) == doctest::Approx(fd).epsilon(1e-5).scale(1));
    }
}

TEST_CASE("pendulum scenario values")
{
    const Scenario wide = build_pendulum_scenario(PendulumVariant::wide);
    const Vector origin = Vector::Zero(2);
    CHECK(wide.safety.value(origin) == doctest::Approx(kPi));
    CHECK(wide.backups.at(0).barrier(origin) == doctest::Approx(0.07));
    CHECK(wide.backups.at(0).control(origin)(0) == 0.0);
    CHECK(wide.model.backup_field(origin, wide.backups[0]).norm() == 0.0);

    const Scenario narrow = build_pendulum_scenario(PendulumVariant::narrow);
    CHECK(narrow.safety.value(origin) == doctest::Approx(1.0));
    CHECK(narrow.safety.value(Vector(Eigen::Vector2d(kPi, 0))) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(narrow.safety.value(Vector(Eigen::Vector2d(0, 1))) == doctest::Approx(0.0).epsilon(1e-12));

    const Eigen::Vector2d up(kPi / 2, 0);
    PendulumOptions plain;
    plain.gravity_feedforward = false;
    const Scenario multi_plain = build_pendulum_scenario(PendulumVariant::multi, plain);
    REQUIRE(multi_plain.backups.size() == 3);
    CHECK(multi_plain.backups[1].control(up)(0) == 0.0);
    CHECK(multi_plain.backups[1].barrier(up) == doctest::Approx(0.025));

    // With feedforward the side centers are equilibria of their closed loops.
    const Scenario multi = build_pendulum_scenario(PendulumVariant::multi);
    CHECK(multi.model.backup_field(up, multi.backups[1]).norm() == doctest::Approx(0.0).scale(1));
    CHECK(multi.model.backup_field(-up, multi.backups[2]).norm() == doctest::Approx(0.0).scale(1));
}

TEST_CASE("asymmetric quadratic weights act through their symmetric part")
{
    Matrix M(2, 2);
    M << 1.17, 0.17, 0.12, 0.22;
    const Matrix S = 0.5 * (M + M.transpose());
    const QuadraticBarrier a{Vector::Zero(2), M, 0.025}, b{Vector::Zero(2), S, 0.025};
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const Vector x = Vector::Random(2);
        CHECK(a(x) == doctest::Approx(b(x)).epsilon(1e-14));
        CHECK((a.gradient(x) - b.gradient(x)).norm() < 1e-14);
    }
}

TEST_CASE("unicycle scenario values")
{
    const UnicycleConfig cfg;
    const Scenario s = build_unicycle_scenario(cfg);
    const Vector f = s.model.drift(Vector(Eigen::Vector4d(0, 0, 2, 0)));
    CHECK((f - Eigen::Vector4d(2, 0, 0, 0)).norm() == 0.0);
    CHECK(s.backups[0].control(Vector(Eigen::Vector4d(1, 2, 0, 0.3))).norm() == 0.0);

    // Point of interest on the goal with heading zero: no turn command.
    const Vector at_goal(Eigen::Vector4d(cfg.goal(0) - cfg.d, cfg.goal(1), 0, 0));
    CHECK((s.point_of_interest(at_goal) - cfg.goal).norm() < 1e-15);
    CHECK(s.desired(at_goal)(1) == 0.0);
    CHECK(s.desired(at_goal)(0) == 0.0);
}

TEST_CASE("unicycle maps without obstacles are rejected")
{
    UnicycleConfig cfg;
    cfg.map.obstacles.clear();
    CHECK_THROWS_AS(build_unicycle_scenario(cfg), Error);
    cfg = UnicycleConfig{};
    cfg.map.obstacles[2].c = 0;
    CHECK_THROWS_AS(build_unicycle_scenario(cfg), Error);

    nlohmann::json j = to_json(default_unicycle_map());
    j["obstacles"][1].erase("bx");
    CHECK_THROWS_AS(parse_unicycle_map(j), ConfigError);
}

TEST_CASE("control polytope construction")
{
    const ControlPolytope box = ControlPolytope::box(Eigen::Vector2d(-1, -2), Eigen::Vector2d(1, 2));
    CHECK(box.vertices().size() == 4);
    for (const Vector& v : box.vertices())
        CHECK(box.max_violation(v) <= 1e-9);

    Matrix A(2, 1);
    A << 1, -1;
    CHECK_THROWS_AS(ControlPolytope(A, Eigen::Vector2d(-1, -1)), Error); // u <= -1 and u >= 1
    Matrix half(1, 2);
    half << 1, 0;
    CHECK_THROWS_AS(ControlPolytope(half, Vector::Ones(1)), Error); // unbounded
}

TEST_CASE("backups are admissible on the sampling boxes")
{
    std::mt19937_64 rng(5);
    for (const Scenario& s : all_scenarios())
        for (int k = 0; k < 10000; ++k) {
            const Vector x = sample(rng, s.box);
            for (const BackupPolicy& b : s.backups)
                REQUIRE(s.polytope.max_violation(b.control(x)) <= 1e-9);
        }
}

TEST_CASE("analytic fields match central differences")
{
    std::mt19937_64 rng(6);
    for (const Scenario& s : all_scenarios()) {
        double worst_grad = 0, worst_jac = 0;
        for (int k = 0; k < 1000; ++k) {
            const Vector x = sample(rng, s.box);
            worst_grad = std::max(worst_grad, oracle::relative_error(s.safety.gradient(x),
                                                                     oracle::fd_gradient(s.safety.value, x, 1e-6)));
            for (const BackupPolicy& b : s.backups) {
                worst_grad = std::max(worst_grad, oracle::relative_error(b.barrier_gradient(x),
                                                                         oracle::fd_gradient(b.barrier, x, 1e-6)));
                const Matrix fd = oracle::fd_jacobian([&](const Vector& z) { return s.model.backup_field(z, b); }, x,
                                                      1e-6);
                worst_jac = std::max(worst_jac, oracle::relative_error(s.model.backup_field_jacobian(x, b), fd));
            }
        }
        INFO(s.name);
        CHECK(worst_grad < 1e-5);
        CHECK(worst_jac < 1e-5);
    }
}

TEST_CASE("backup sets are invariant under their own backups")
{
    std::mt19937_64 rng(8);
    for (const Scenario& s : all_scenarios()) {
        const HorizonGrid grid{200, 0.05, 4};
        for (std::size_t j = 0; j < s.backups.size(); ++j) {
            int tried = 0;
            for (int k = 0; k < 200000 && tried < 30; ++k) {
                const Vector x = sample(rng, s.box);
                if (s.backups[j].barrier(x) < 0)
                    continue;
                ++tried;
                const FlowResult flow = integrate_flow(s, j, x, grid);
                for (const Vector& p : flow.phi)
                    REQUIRE(s.backups[j].barrier(p) >= -1e-6);
            }
            INFO(s.name << " backup " << j);
            CHECK(tried > 0);
        }
    }
}
