#include <cmath>

#include "doctest.h"
#include "dmn/error.hpp"
#include "dmn/gsm.hpp"
#include "../support/oracles.hpp"

using namespace dmn;

namespace {

SymMat uniaxial(double e) {
  SymMat v = SymMat::Zero();
  v(0) = e;
  return v;
}

Stiffness fd_tangent(const GsmSpec& spec, const GsmState& s, const SymMat& eps, double h) {
  Stiffness t;
  for (int j = 0; j < 6; ++j) {
    SymMat ep = eps, em = eps;
    ep(j) += h;
    em(j) -= h;
    t.col(j) = (stress_and_tangent(spec, s, ep).stress - stress_and_tangent(spec, s, em).stress) / (2.0 * h);
  }
  return t;
}

}  // namespace

TEST_CASE("composite phase parameters") {
  const GsmSpec m = polyamide_matrix();
  CHECK(m.young == doctest::Approx(2100.0));
  CHECK(m.poisson == doctest::Approx(0.3));
  CHECK(m.hardening.sigma0 == doctest::Approx(29.0));
  CHECK(m.hardening.sigma_inf == doctest::Approx(61.7));
  CHECK(m.hardening.k0 == doctest::Approx(10600.0));
  CHECK(m.hardening.k_inf == doctest::Approx(139.0));
  const GsmSpec f = glass_fiber();
  CHECK(f.kind == GsmKind::LinearElastic);
  CHECK(f.young == doctest::Approx(72000.0));
  CHECK(f.poisson == doctest::Approx(0.22));
}

TEST_CASE("hardening law") {
  const HardeningParams& h = polyamide_matrix().hardening;
  CHECK(hardening(0.0, h).stress == doctest::Approx(29.0));
  CHECK(hardening(0.0, h).slope == doctest::Approx(10600.0));
  CHECK(hardening(50.0, h).slope == doctest::Approx(139.0));
  const double e = 0.013;
  const double ref = 29.0 + 139.0 * e + (61.7 - 29.0) * (1.0 - std::exp(-(10600.0 - 139.0) / (61.7 - 29.0) * e));
  CHECK(hardening(e, h).stress == doctest::Approx(ref).epsilon(1e-14));
  const double d = 1e-7;
  CHECK(hardening(e, h).slope ==
        doctest::Approx((hardening(e + d, h).stress - hardening(e - d, h).stress) / (2 * d)).epsilon(1e-6));

  const HardeningParams& p = aluminum().hardening;
  CHECK(hardening(0.0, p).stress == doctest::Approx(75.0));
  CHECK(hardening(0.01, p).stress == doctest::Approx(75.0 + 416.0 * std::pow(0.01, 0.3895)));
}

TEST_CASE("linear elastic kernel") {
  const GsmSpec s = glass_fiber();
  SymMat eps;
  eps << 1e-3, -2e-4, 5e-4, 3e-4, -1e-4, 2e-4;
  const GsmResponse r = stress_and_tangent(s, GsmState{}, eps);
  CHECK((r.stress - s.elastic_stiffness() * eps).norm() == 0.0);
  CHECK((r.tangent - s.elastic_stiffness()).norm() == 0.0);
  CHECK(r.state.eq_plastic_strain == 0.0);
}

TEST_CASE("below first yield the matrix stays elastic") {
  const GsmSpec m = polyamide_matrix();
  const SymMat eps = uniaxial(5e-3);
  const GsmResponse r = stress_and_tangent(m, GsmState{}, eps);
  const Mat3 s = from_mandel(r.stress);
  const Mat3 dev = s - s.trace() / 3.0 * Mat3::Identity();
  CHECK(std::sqrt(1.5) * dev.norm() < 29.0);
  CHECK(r.state.eq_plastic_strain == 0.0);
  CHECK((r.stress - m.elastic_stiffness() * eps).norm() < 1e-12);
}

TEST_CASE("consistent tangent against finite differences") {
  const GsmSpec m = polyamide_matrix();
  SymMat dir;
  dir << 1.0, -0.3, -0.2, 0.4, 0.1, -0.5;

  GsmState loaded = commit(stress_and_tangent(m, GsmState{}, 0.02 * dir));
  REQUIRE(loaded.eq_plastic_strain > 0.0);
  struct Probe {
    GsmState state;
    SymMat eps;
  };
  const Probe probes[] = {
      {GsmState{}, 1e-3 * dir},   // elastic
      {GsmState{}, 0.03 * dir},   // plastic loading from virgin state
      {loaded, 0.025 * dir},      // further loading
      {loaded, 0.015 * dir},      // elastic unloading
  };
  for (const Probe& pr : probes) {
    const GsmResponse r = stress_and_tangent(m, pr.state, pr.eps);
    const Stiffness fd = fd_tangent(m, pr.state, pr.eps, 1e-7);
    CHECK((r.tangent - fd).norm() / r.tangent.norm() < 1e-5);
    CHECK((r.tangent - r.tangent.transpose()).norm() / r.tangent.norm() < 1e-10);
  }
  const GsmResponse un = stress_and_tangent(m, loaded, 0.015 * dir);
  CHECK(un.state.eq_plastic_strain == loaded.eq_plastic_strain);
}

TEST_CASE("uniaxial ramp matches a dense rate integration") {
  const GsmSpec m = polyamide_matrix();
  std::vector<SymMat> strains;
  for (int n = 1; n <= 40; ++n) strains.push_back(uniaxial(0.05 * n / 40.0));
  const std::vector<SymMat> ref = oracle::j2_rate_path(m, strains, 1000);

  GsmState s;
  double prev = 0.0;
  for (std::size_t n = 0; n < strains.size(); ++n) {
    const GsmResponse r = stress_and_tangent(m, s, strains[n]);
    CHECK(r.state.eq_plastic_strain >= prev);
    prev = r.state.eq_plastic_strain;
    s = commit(r);
    CHECK((r.stress - ref[n]).norm() / ref[n].norm() < 1e-3);
  }
  CHECK(prev > 0.0);
}

TEST_CASE("committed steps dissipate") {
  const GsmSpec m = polyamide_matrix();
  GsmState s;
  SymMat eps_n = SymMat::Zero();
  double psi_n = 0.0;
  for (int n = 1; n <= 60; ++n) {
    const double t = n / 60.0;
    SymMat eps;
    eps << 0.03 * std::sin(2 * kPi * t), -0.01 * t, 0.0, 0.02 * std::sin(4 * kPi * t), 0.0, 0.0;
    const GsmResponse r = stress_and_tangent(m, s, eps);
    const double psi = free_energy(m, r.state, eps);
    const SymMat de = eps - eps_n;
    CHECK(r.stress.dot(de) - (psi - psi_n) >= -1e-10 * r.stress.norm() * de.norm());
    s = commit(r);
    eps_n = eps;
    psi_n = psi;
  }
}

TEST_CASE("material JSON") {
  const GsmSpec m = polyamide_matrix();
  const GsmSpec back = gsm_from_json_text(gsm_to_json_text(m));
  CHECK(back.kind == GsmKind::J2Plastic);
  CHECK(back.hardening.k0 == m.hardening.k0);
  CHECK(back.hardening.sigma_inf == m.hardening.sigma_inf);
  const GsmSpec al = gsm_from_json_text(gsm_to_json_text(aluminum()));
  CHECK(al.hardening.law == HardeningLaw::PowerLaw);
  CHECK(al.hardening.m == doctest::Approx(0.3895));
  CHECK_THROWS(gsm_from_json_text("{\"kind\": \"viscous\"}"));
  CHECK_THROWS(gsm_from_json_text("not json"));
}

TEST_CASE("inadmissible parameters") {
  CHECK_THROWS_AS(GsmSpec::elastic(-1.0, 0.3).validate(), PreconditionError);
  CHECK_THROWS_AS(GsmSpec::elastic(100.0, 0.5).validate(), PreconditionError);
  CHECK_THROWS_AS(GsmSpec::j2_exponential(2100, 0.3, 29, 20, 10600, 139).validate(), PreconditionError);
}
