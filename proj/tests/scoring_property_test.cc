#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dive/scoring.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace dive {
namespace {

using testing::al1_oracle;
using testing::random_nonzero;
using testing::uniform_int;
using testing::uniform_real;
using testing::vec;

TEST(Al1Property, MatchesBreakpointOracle) {
  for (int t = 0; t < 10000; ++t) {
    const auto dims = uniform_int(1, 40);
    const double density = uniform_real(0.05, 1.0);
    const auto q = random_nonzero(dims, density);
    const auto p = random_nonzero(dims, density);
    const double w0 = t % 3 == 0 ? 5.0 : uniform_real(0.1, 20.0);
    const double got = *al1(vec(q), vec(p), w0);
    ASSERT_NEAR(got, al1_oracle(q, p, w0), 1e-9) << "trial " << t;
  }
}

TEST(Al1Property, NonNegativeAndBoundedByL1) {
  for (int t = 0; t < 2000; ++t) {
    const auto dims = uniform_int(1, 30);
    const auto q = random_nonzero(dims, 0.4);
    const auto p = random_nonzero(dims, 0.4);
    ASSERT_GE(*al1(vec(q), vec(p), uniform_real(0.1, 20.0)), 0.0);
    ASSERT_LE(*al1(vec(q), vec(p), 1.0), testing::l1_distance(q, p) + 1e-12);
  }
}

TEST(Al1Property, ZeroOnScaledCopy) {
  for (int t = 0; t < 1000; ++t) {
    const auto q = random_nonzero(uniform_int(1, 30), 0.5);
    auto p = q;
    const double k = uniform_real(0.1, 10);
    for (auto& x : p) x *= k;
    ASSERT_NEAR(*al1(vec(q), vec(p)), 0.0, 1e-12);
  }
}

TEST(ScoreRanges, BoundedMeasures) {
  for (int t = 0; t < 2000; ++t) {
    const auto dims = uniform_int(1, 30);
    const auto q = vec(random_nonzero(dims, 0.3));
    const auto p = vec(random_nonzero(dims, 0.3));
    for (auto s : {cde(q, p), weeds_precision(q, p), invcl(q, p)}) {
      ASSERT_GE(*s, 0.0);
      ASSERT_LE(*s, 1.0 + 1e-12);
    }
    const double c = *cosine(q, p);
    ASSERT_GE(c, -1e-12);
    ASSERT_LE(c, 1.0 + 1e-12);
  }
}

TEST(ScoreRanges, CosineOfSignedVectorsInUnitInterval) {
  for (int t = 0; t < 1000; ++t) {
    const auto dims = uniform_int(1, 20);
    std::vector<double> u(dims), v(dims);
    for (auto& x : u) x = uniform_real(-1, 1);
    for (auto& x : v) x = uniform_real(-1, 1);
    const auto c = cosine(vec(u), vec(v));
    if (!c) continue;
    ASSERT_GE(*c, -1.0 - 1e-12);
    ASSERT_LE(*c, 1.0 + 1e-12);
  }
}

TEST(Antisymmetry, GeneralityDifferences) {
  for (int t = 0; t < 2000; ++t) {
    const auto dims = uniform_int(1, 30);
    const auto q = vec(random_nonzero(dims, 0.3));
    const auto p = vec(random_nonzero(dims, 0.3));
    ASSERT_DOUBLE_EQ(sum_diff(q, p), -sum_diff(p, q));
    ASSERT_DOUBLE_EQ(norm2_diff(q, p), -norm2_diff(p, q));
    ASSERT_DOUBLE_EQ(*entropy_diff(q, p), -*entropy_diff(p, q));
  }
}

TEST(CdeInclusion, OneExactlyWhenIncluded) {
  for (int t = 0; t < 2000; ++t) {
    const auto dims = uniform_int(1, 30);
    const auto q = random_nonzero(dims, 0.4);
    auto p = q;
    for (auto& x : p) {
      if (uniform_real(0, 1) < 0.5) x += uniform_real(0.0, 5.0);
    }
    ASSERT_DOUBLE_EQ(*cde(vec(q), vec(p)), 1.0);

    // Break inclusion on one supported context.
    std::size_t c = uniform_int(0, dims - 1);
    while (q[c] == 0) c = (c + 1) % dims;
    p[c] = std::max(0.0, q[c] - uniform_real(0.01, q[c]));
    ASSERT_LT(*cde(vec(q), vec(p)), 1.0);
  }
}

TEST(ScaleInvariance, NormalizedMeasures) {
  for (int t = 0; t < 1000; ++t) {
    const auto dims = uniform_int(1, 30);
    const auto qd = random_nonzero(dims, 0.4);
    const auto pd = random_nonzero(dims, 0.4);
    const double k = uniform_real(0.1, 10);
    auto ks = qd;
    for (auto& x : ks) x *= k;
    const auto q = vec(qd), p = vec(pd), kq = vec(ks);
    ASSERT_NEAR(*cosine(kq, p), *cosine(q, p), 1e-12);
    ASSERT_NEAR(*entropy_diff(kq, p), *entropy_diff(q, p), 1e-9);
    ASSERT_NEAR(*al1(kq, p), *al1(q, p), 1e-9);
    ASSERT_NEAR(*weeds_precision(kq, p), *weeds_precision(q, p), 1e-12);
  }
}

TEST(ScaleInvariance, CommonScalingKeepsRanking) {
  for (int t = 0; t < 1000; ++t) {
    const auto dims = uniform_int(1, 30);
    const double k = uniform_real(0.05, 20);
    const auto qd = random_nonzero(dims, 0.4);
    const auto pd = random_nonzero(dims, 0.4);
    auto qs = qd, ps = pd;
    for (auto& x : qs) x *= k;
    for (auto& x : ps) x *= k;
    const auto q = vec(qd), p = vec(pd), kq = vec(qs), kp = vec(ps);
    ASSERT_NEAR(*cde(kq, kp), *cde(q, p), 1e-12);
    ASSERT_NEAR(*invcl(kq, kp), *invcl(q, p), 1e-12);
    ASSERT_NEAR(*al1(kq, kp), *al1(q, p), 1e-9);
    ASSERT_NEAR(sum_diff(kq, kp), k * sum_diff(q, p), 1e-9 * (1 + k * q.norm1() + k * p.norm1()));
    ASSERT_NEAR(norm2_diff(kq, kp), k * norm2_diff(q, p), 1e-9 * (1 + k * q.norm2() + k * p.norm2()));
  }
}

}  // namespace
}  // namespace dive
