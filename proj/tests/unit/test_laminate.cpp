#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "dmn/laminate.hpp"
#include "oracles.hpp"

using namespace dmn;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

Stiffness random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Stiffness a;
  for (int i = 0; i < 36; ++i) a.data()[i] = u(rng);
  return 100.0 * (a * a.transpose() + 0.5 * Stiffness::Identity());
}

double min_eig(const Stiffness& s) { return Eigen::SelfAdjointEigenSolver<Stiffness>(s).eigenvalues().minCoeff(); }

}  // namespace

TEST_CASE("laminate agrees with interface oracle for oblique normals") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const Vec3 n = random_unit(rng);
    const double ka = 1000.0 * (k + 1), ga = 300.0, kb = 50.0, gb = 20.0 * (k + 1), c = 0.05 * (k + 1) - 0.02;
    const Stiffness ref = oracle::to_six(
        oracle::laminate(oracle::isotropic(ka, ga), oracle::isotropic(kb, gb), c, {n[0], n[1], n[2]}));
    const Stiffness got = laminate_stiffness({isotropic_stiffness(ka, ga), isotropic_stiffness(kb, gb), c, n});
    CHECK(oracle::rel_frobenius(got, ref) < 1e-10);
  }
}

TEST_CASE("laminate result is independent of the reference parameter") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const LaminateInput in{random_spd(rng), random_spd(rng), 0.3, random_unit(rng)};
    const double a = default_alpha(in.c_a, in.c_b);
    CHECK(oracle::rel_frobenius(laminate_stiffness(in, 3.7 * a), laminate_stiffness(in, a)) < 1e-9);
  }
}

TEST_CASE("laminate lies between the Reuss and Voigt bounds") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const LaminateInput in{random_spd(rng), random_spd(rng), frac(rng), random_unit(rng)};
    const Stiffness c = laminate_stiffness(in);
    const Stiffness voigt = in.frac_a * in.c_a + (1.0 - in.frac_a) * in.c_b;
    const Stiffness reuss = (in.frac_a * in.c_a.inverse() + (1.0 - in.frac_a) * in.c_b.inverse()).inverse();
    const double scale = voigt.norm();
    CHECK(min_eig(voigt - c) >= -1e-9 * scale);
    CHECK(min_eig(c - reuss) >= -1e-9 * scale);
    CHECK(is_symmetric(c, 1e-10));
  }
}

TEST_CASE("laminate limits") {
  std::mt19937_64 rng(7);
  const Stiffness a = random_spd(rng), b = random_spd(rng);
  const Vec3 n = random_unit(rng);
  CHECK(oracle::rel_frobenius(laminate_stiffness({a, b, 1.0, n}), a) < 1e-10);
  CHECK(oracle::rel_frobenius(laminate_stiffness({a, b, 0.0, n}), b) < 1e-10);
  CHECK(oracle::rel_frobenius(laminate_stiffness({a, a, 0.4, n}), a) < 1e-10);
}

TEST_CASE("laminate adjoint matches finite differences") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) {
    const LaminateInput in{random_spd(rng), random_spd(rng), 0.2 + 0.012 * k, random_unit(rng)};
    Stiffness w;
    for (int i = 0; i < 36; ++i) w.data()[i] = g(rng);
    const double alpha = 2.5 * default_alpha(in.c_a, in.c_b);
    const LaminateGradients gr = laminate_stiffness_adjoint(in, w, alpha);
    // Random direction in the joint input space.
    Stiffness da, db;
    for (int i = 0; i < 36; ++i) {
      da.data()[i] = 100.0 * g(rng);
      db.data()[i] = 100.0 * g(rng);
    }
    const double df = g(rng);
    const Vec3 dn(g(rng), g(rng), g(rng));
    const double analytic = (gr.d_ca.array() * da.array()).sum() + (gr.d_cb.array() * db.array()).sum() +
                            gr.d_frac * df + gr.d_n.dot(dn);
    // The tape takes n as given, so the direction may leave the unit sphere.
    const double h = 1e-6;
    detail::LaminateTape tp, tm;
    tp.forward(in.c_a + h * da, in.c_b + h * db, in.frac_a + h * df, in.n + h * dn, alpha);
    tm.forward(in.c_a - h * da, in.c_b - h * db, in.frac_a - h * df, in.n - h * dn, alpha);
    const double fd = ((w.array() * tp.result().array()).sum() - (w.array() * tm.result().array()).sum()) / (2 * h);
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}
