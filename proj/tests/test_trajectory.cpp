#include <doctest.h>

#include "test_util.hpp"
#include "vdcsim/sim.hpp"

using namespace vdcsim;
using namespace vdcsim::testutil;

namespace {

QuinticSegment example_segment() {
  QuinticSegment seg;
  seg.start << 0.1, -0.2, 0.3, 0.0, 0.1, -0.1;
  seg.target << 0.4, 0.2, -0.1, 0.2, 0.0, 0.3;
  seg.t0 = 0.5;
  seg.duration = 2.0;
  return seg;
}

}  // namespace

TEST_CASE("segment boundary conditions are rest-to-rest") {
  const QuinticSegment seg = example_segment();
  Vec6 x, v, a;

  quintic_eval(seg, seg.t0, x, v, a);
  CHECK((x - seg.start).norm() < 1e-15);
  CHECK(v.norm() < 1e-15);
  CHECK(a.norm() < 1e-15);

  quintic_eval(seg, seg.t0 + seg.duration, x, v, a);
  CHECK((x - seg.target).norm() < 1e-13);
  CHECK(v.norm() < 1e-13);
  CHECK(a.norm() < 1e-13);

  // Clamped outside the span.
  quintic_eval(seg, seg.t0 - 1.0, x, v, a);
  CHECK((x - seg.start).norm() < 1e-15);
  quintic_eval(seg, seg.t0 + seg.duration + 3.0, x, v, a);
  CHECK((x - seg.target).norm() < 1e-13);
  CHECK(v.norm() < 1e-13);
}

TEST_CASE("segment midpoint halves the travel, velocity peaks there") {
  const QuinticSegment seg = example_segment();
  Vec6 x, v, a;
  quintic_eval(seg, seg.t0 + 0.5 * seg.duration, x, v, a);
  CHECK((x - 0.5 * (seg.start + seg.target)).norm() < 1e-13);
  // Smooth-profile peak rate: 15/8 * travel / duration.
  const Vec6 peak = (15.0 / 8.0) * (seg.target - seg.start) / seg.duration;
  CHECK((v - peak).norm() < 1e-13);
  CHECK(a.norm() < 1e-12);
}

TEST_CASE("derivatives agree with central finite differences") {
  const QuinticSegment seg = example_segment();
  const double h = 1e-6;
  for (double t : {0.7, 1.1, 1.9, 2.3}) {
    Vec6 xm, vm, am, xp, vp, ap, x, v, a;
    quintic_eval(seg, t - h, xm, vm, am);
    quintic_eval(seg, t + h, xp, vp, ap);
    quintic_eval(seg, t, x, v, a);
    CHECK(((xp - xm) / (2.0 * h) - v).norm() < 1e-7);
    CHECK(((vp - vm) / (2.0 * h) - a).norm() < 1e-6);
  }
}

TEST_CASE("non-positive duration is rejected") {
  QuinticSegment seg = example_segment();
  seg.duration = 0.0;
  Vec6 x, v, a;
  CHECK_THROWS_AS(quintic_eval(seg, 1.0, x, v, a), std::invalid_argument);
}

TEST_CASE("plan chains segments with holds and a base pose") {
  TrajectoryPlan plan;
  plan.base_pose << 1, 0, 0, 0, 0, 0;
  Vec6 first = plan.base_pose;
  first(1) = 0.5;
  plan.append(first, 1.0, 0.25);
  Vec6 second = first;
  second(2) = -0.3;
  plan.append(second, 2.0, 0.5);

  CHECK(plan.horizon() == doctest::Approx(0.25 + 1.0 + 0.5 + 2.0));

  Vec6 x, v, a;
  plan.eval(0.1, x, v, a);  // still holding the base pose
  CHECK((x - plan.base_pose).norm() < 1e-15);
  CHECK(v.norm() < 1e-15);

  plan.eval(1.25, x, v, a);  // end of first segment
  CHECK((x - first).norm() < 1e-13);

  plan.eval(1.5, x, v, a);  // inter-segment hold
  CHECK((x - first).norm() < 1e-13);
  CHECK(v.norm() < 1e-13);

  plan.eval(100.0, x, v, a);  // terminal hold
  CHECK((x - second).norm() < 1e-13);
  CHECK(v.norm() < 1e-13);
  CHECK(a.norm() < 1e-13);
}
