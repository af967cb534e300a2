#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vdcsim/adaptation.hpp"

using namespace vdcsim;
using namespace vdcsim::testutil;

TEST_CASE("dual construction satisfies the trace pairing on the full basis") {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    Vec10 eta = Vec10::Zero();
    eta(i) = 1.0;
    const Mat4 s = pseudo_inertia_dual(eta);
    CHECK((s - s.transpose()).norm() < 1e-12);
    for (int j = 0; j < 10; ++j) {
      Vec10 delta = Vec10::Zero();
      delta(j) = 1.0;
      const double pairing = (s * pseudo_inertia(delta)).trace();
      worst = std::max(worst, std::abs(pairing - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("dual pairing holds for random directions by linearity") {
  auto rng = make_rng(301);
  for (int i = 0; i < 200; ++i) {
    const Vec10 eta = random_matrix<10, 1>(rng, -5.0, 5.0);
    const Vec10 delta = random_matrix<10, 1>(rng, -5.0, 5.0);
    const double pairing = (pseudo_inertia_dual(eta) * pseudo_inertia(delta)).trace();
    CHECK(pairing == doctest::Approx(eta.dot(delta)).epsilon(1e-12));
  }
}

TEST_CASE("adaptation signal is the regressor transpose on the velocity gap") {
  auto rng = make_rng(302);
  const Vec6 dv = random_vec6(rng);
  const Vec6 vr = random_vec6(rng);
  const Vec6 v = random_vec6(rng);
  const RegressorMatrix y = regressor(dv, vr, v, Vec3(0, 0, -9.81));
  CHECK((adaptation_signal(y, vr, v) - y.transpose() * (vr - v)).norm() == 0.0);
}

TEST_CASE("update step preserves symmetry and positive definiteness") {
  auto rng = make_rng(303);
  Mat4 l = 0.5 * Mat4::Identity();
  int projections = 0;
  for (int i = 0; i < 500; ++i) {
    const Vec10 eta = random_matrix<10, 1>(rng, -20.0, 20.0);
    l = nal_step(l, eta, 10.0, 1e-3, &projections);
    CHECK((l - l.transpose()).norm() < 1e-12);
    CHECK(min_eigenvalue(l) > 0.0);
  }
  CHECK(projections == 0);
}

TEST_CASE("update step matches the continuous flow to first order") {
  auto rng = make_rng(304);
  const Mat4 l = random_spd<4>(rng, 0.5);
  const Vec10 eta = random_matrix<10, 1>(rng, -2.0, 2.0);
  const double gamma = 10.0;
  const Mat4 s = pseudo_inertia_dual(eta);
  const Mat4 flow = (1.0 / gamma) * l * s * l;

  const double dt_a = 1e-5;
  const double dt_b = 1e-6;
  const double err_a = ((nal_step(l, eta, gamma, dt_a) - l) / dt_a - flow).norm();
  const double err_b = ((nal_step(l, eta, gamma, dt_b) - l) / dt_b - flow).norm();
  CHECK(err_a < 1e-3);
  // First-order truncation: the defect shrinks linearly with dt.
  CHECK(err_b < 0.2 * err_a);
}

TEST_CASE("eigenvalue floor projection reports itself") {
  // Choose eta so its dual is exactly -20 * Identity; with gamma = 10 and
  // dt = 1 the congruence factor G = (1 - dt/(2 gamma) * 20) * I vanishes
  // and the update collapses, forcing the floor projection.
  Vec10 eta;
  for (int j = 0; j < 10; ++j) {
    Vec10 delta = Vec10::Zero();
    delta(j) = 1.0;
    eta(j) = -20.0 * pseudo_inertia(delta).trace();
  }
  CHECK((pseudo_inertia_dual(eta) + 20.0 * Mat4::Identity()).norm() < 1e-9);

  int projections = 0;
  const Mat4 next = nal_step(Mat4::Identity(), eta, 10.0, 1.0, &projections);
  CHECK(projections == 1);
  CHECK(min_eigenvalue(next) >= 1e-10);
}

TEST_CASE("uniform initial state and per-body update bookkeeping") {
  AdaptState st = AdaptState::uniform(3, 0.5, 10.0);
  REQUIRE(st.L_hat.size() == 3);
  CHECK((st.L_hat[1] - 0.5 * Mat4::Identity()).norm() == 0.0);
  CHECK(st.gamma == 10.0);
  CHECK(st.spd_projections == 0);

  // Half-scale identity pseudo-inertia means mass 0.5, no first moment,
  // rotational inertia 1.0 * I3.
  const Vec10 phi = st.phi_hat(0);
  CHECK(phi(0) == doctest::Approx(0.5));
  CHECK(phi.segment<3>(1).norm() < 1e-15);
  CHECK(phi(4) == doctest::Approx(1.0));

  std::vector<Vec10> etas(2, Vec10::Zero());
  CHECK_THROWS_AS(nal_update(st, etas, 1e-3), std::invalid_argument);
  etas.assign(3, Vec10::Zero());
  nal_update(st, etas, 1e-3);
  CHECK((st.L_hat[0] - 0.5 * Mat4::Identity()).norm() < 1e-15);
}

TEST_CASE("log-det divergence: closed forms, positivity, strictness") {
  const double d = bregman_divergence(Mat4::Identity(), 2.0 * Mat4::Identity());
  CHECK(d == doctest::Approx(4.0 * std::log(2.0) - 2.0));

  auto rng = make_rng(305);
  for (int i = 0; i < 50; ++i) {
    const Mat4 a = random_spd<4>(rng, 0.5);
    const Mat4 b = random_spd<4>(rng, 0.5);
    CHECK(bregman_divergence(a, a) == doctest::Approx(0.0).epsilon(1e-12));
    if ((a - b).norm() > 1e-6) {
      CHECK(bregman_divergence(a, b) > 0.0);
    }
  }
  Mat4 indefinite = Mat4::Identity();
  indefinite(3, 3) = -1.0;
  CHECK_THROWS_AS(bregman_divergence(indefinite, Mat4::Identity()),
                  std::invalid_argument);
}
