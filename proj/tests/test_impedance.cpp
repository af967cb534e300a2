#include <doctest.h>

#include <cstring>

#include "test_util.hpp"
#include "vdcsim/impedance.hpp"

using namespace vdcsim;
using namespace vdcsim::testutil;

namespace {

/// Valid random spec: SPD target matrices, Hurwitz (shifted negative
/// definite plus a skew part) leak, invertible surface weights.
ImpedanceSpec random_spec(std::mt19937_64& rng) {
  ImpedanceSpec s;
  s.M_d = random_spd<6>(rng);
  s.D_d = random_spd<6>(rng);
  s.K_d = random_spd<6>(rng);
  const Mat6 skew_part = random_matrix<6, 6>(rng);
  s.Lambda = -random_spd<6>(rng) + 0.3 * (skew_part - skew_part.transpose());
  s.theta_psi = random_spd<6>(rng, 0.5);
  s.theta_e = random_spd<6>(rng, 0.5);
  return s;
}

/// Desk-scale tuning used across the shipped scenarios.
ImpedanceSpec desk_spec() {
  ImpedanceSpec s;
  Vec6 md;
  md << 1, 1, 2.2, 1, 1, 1;
  s.M_d = md.asDiagonal();
  s.D_d = 80.0 * Mat6::Identity();
  s.K_d = 200.0 * Mat6::Identity();
  Vec6 lam;
  lam << -40, -40, -36, -40, -40, -40;
  s.Lambda = lam.asDiagonal();
  Vec6 tp;
  tp << 10, 10, 15, 10, 10, 10;
  s.theta_psi = tp.asDiagonal();
  Vec6 te;
  te << 15, 15, 8, 20, 20, 20;
  s.theta_e = te.asDiagonal();
  return s;
}

double max_abs(const Mat6& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("derived gains satisfy the three matching conditions") {
  auto rng = make_rng(401);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const ImpedanceSpec s = random_spec(rng);
    const AllocatorGains g = derive_gains(s);
    const Mat6 m_inv = s.M_d.llt().solve(Mat6::Identity());
    const Mat6 tpsi_inv = s.theta_psi.partialPivLu().solve(Mat6::Identity());
    worst = std::max(worst, max_abs(s.theta_psi * g.Gamma_f - m_inv));
    worst = std::max(
        worst, max_abs(s.theta_psi * g.Gamma_p -
                       (m_inv * s.K_d +
                        s.theta_psi * s.Lambda * tpsi_inv * s.theta_e)));
    worst = std::max(worst,
                     max_abs(s.theta_psi * g.Gamma_v -
                             (m_inv * s.D_d - s.theta_e +
                              s.theta_psi * s.Lambda * tpsi_inv)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("desk gains give the expected scalar values on the third channel") {
  const AllocatorGains g = derive_gains(desk_spec());
  // Hand-derived from the diagonal matching conditions with
  // m = 2.2, d = 80, k = 200, lambda = -36, theta_psi = 15, theta_e = 8:
  //   Gamma_f = 1/(15*2.2)                     =  0.0303030...
  //   Gamma_p = (200/2.2 - 36*8)/15            = -13.1393939...
  //   Gamma_v = (80/2.2 - 8 - 36)/15           = -0.5090909...
  CHECK(g.Gamma_f(2, 2) == doctest::Approx(0.030303).epsilon(1e-3));
  CHECK(g.Gamma_p(2, 2) == doctest::Approx(-13.1394).epsilon(1e-3));
  CHECK(g.Gamma_v(2, 2) == doctest::Approx(-0.509091).epsilon(1e-3));
}

TEST_CASE("spec validation rejects broken tuning") {
  ImpedanceSpec s = desk_spec();
  CHECK_NOTHROW(s.validate());

  s.M_d = -Mat6::Identity();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = desk_spec();
  s.Lambda = Mat6::Identity();  // right-half-plane leak
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = desk_spec();
  s.theta_psi = Mat6::Zero();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("filter step reproduces the exact linear response") {
  const ImpedanceSpec s = desk_spec();
  const AllocatorGains g = derive_gains(s);
  auto rng = make_rng(402);
  const Vec6 psi0 = random_vec6(rng);
  const Vec6 e = random_vec6(rng, -0.1, 0.1);
  const Vec6 ed = random_vec6(rng, -0.5, 0.5);
  const Vec6 ef = random_vec6(rng, -5.0, 5.0);
  const double dt = 1e-3;

  const Vec6 psi1 = psi_step(s, g, psi0, e, ed, ef, dt);

  // Diagonal Lambda: each channel is d(psi)/dt = lambda*psi + u with the
  // input frozen, so the exact step is known channel by channel. The
  // integrator is fourth order, so its truncation error per step is about
  // (lambda*dt)^5/120 ~ 1e-9 relative at lambda*dt = -0.04; 1e-8 leaves
  // margin above that while still catching any formula mistake.
  const Vec6 u = g.Gamma_p * e + g.Gamma_v * ed + g.Gamma_f * ef;
  for (int c = 0; c < 6; ++c) {
    const double lam = s.Lambda(c, c);
    const double exact =
        std::exp(lam * dt) * (psi0(c) + u(c) / lam) - u(c) / lam;
    CHECK(psi1(c) == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("surface and required motion follow their definitions") {
  const ImpedanceSpec s = desk_spec();
  const AllocatorGains g = derive_gains(s);
  auto rng = make_rng(403);
  const Vec6 psi = random_vec6(rng);
  const Vec6 e = random_vec6(rng);
  const Vec6 ed = random_vec6(rng);
  const Vec6 ef = random_vec6(rng);
  const Vec6 xd_dot = random_vec6(rng);
  const Vec6 xd_ddot = random_vec6(rng);

  const Vec6 ups = sliding_surface(s, ed, e, psi);
  CHECK((ups - (ed + s.theta_e * e + s.theta_psi * psi)).norm() < 1e-14);

  const RequiredTask rt = required_task(s, g, psi, e, ed, ef, xd_dot, xd_ddot);
  CHECK((rt.vel - (xd_dot - s.theta_e * e - s.theta_psi * psi)).norm() <
        1e-14);
  CHECK((rt.psi_dot - psi_derivative(s, g, psi, e, ed, ef)).norm() < 1e-14);
  CHECK((rt.acc - (xd_ddot - s.theta_e * ed - s.theta_psi * rt.psi_dot))
            .norm() < 1e-14);

  // Tracking the required velocity exactly zeroes the surface.
  const Vec6 x_dot = rt.vel;
  const Vec6 e_dot_on_surface = x_dot - xd_dot;
  CHECK(sliding_surface(s, e_dot_on_surface, e, psi).norm() < 1e-14);
}

TEST_CASE("first-order substitution reproduces the reduced law bitwise") {
  auto rng = make_rng(404);
  int exact_matches = 0;
  for (int i = 0; i < 100; ++i) {
    ImpedanceSpec s;
    s.M_d = Mat6::Identity();  // unused by the reduced law
    s.D_d = random_spd<6>(rng);
    s.K_d = random_spd<6>(rng);
    s.Lambda = -Mat6::Identity();
    // The reduction: surface weights from damping and stiffness, and the
    // filter state replaced by the force error itself.
    s.theta_psi = s.D_d.inverse();
    s.theta_e = s.theta_psi * s.K_d;

    const AllocatorGains g = derive_gains(s);
    const Vec6 e = random_vec6(rng);
    const Vec6 ef = random_vec6(rng, -10.0, 10.0);
    const Vec6 xd_dot = random_vec6(rng);

    const Vec6 second_order =
        required_task(s, g, /*psi=*/ef, e, Vec6::Zero(), ef, xd_dot,
                      Vec6::Zero())
            .vel;
    const Vec6 reduced = first_order_required_velocity(s, e, ef, xd_dot);
    if (std::memcmp(second_order.data(), reduced.data(), sizeof(double) * 6) ==
        0) {
      ++exact_matches;
    }
  }
  CHECK(exact_matches == 100);
}

TEST_CASE("damped pseudo-inverse reference rates") {
  auto rng = make_rng(405);
  const MatX j = MatX::Random(6, 3);
  const Vec6 vel_r = random_vec6(rng);
  const Vec6 acc_r = random_vec6(rng);
  const MatX jdot = MatX::Random(6, 3);
  const RequiredJoint rj = required_joint(j, jdot, vel_r, acc_r);
  const MatX pinv = damped_pinv(j);
  CHECK((rj.qdot_r - pinv * vel_r).norm() < 1e-12);
  CHECK((rj.qddot_r - pinv * (acc_r - jdot * rj.qdot_r)).norm() < 1e-12);
}
