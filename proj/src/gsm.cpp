#include "dmn/gsm.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "dmn/error.hpp"

namespace dmn {

namespace {

constexpr double kReturnMapTol = 1e-12;
constexpr int kReturnMapMaxIter = 100;
constexpr double kPowerLawOffset = 1e-12;

}  // namespace

GsmSpec GsmSpec::elastic(double young, double poisson) {
  GsmSpec s;
  s.kind = GsmKind::LinearElastic;
  s.young = young;
  s.poisson = poisson;
  s.validate();
  return s;
}

GsmSpec GsmSpec::j2_exponential(double young, double poisson, double sigma0, double sigma_inf, double k0,
                                double k_inf) {
  GsmSpec s;
  s.kind = GsmKind::J2Plastic;
  s.young = young;
  s.poisson = poisson;
  s.hardening.law = HardeningLaw::ExponentialLinear;
  s.hardening.sigma0 = sigma0;
  s.hardening.sigma_inf = sigma_inf;
  s.hardening.k0 = k0;
  s.hardening.k_inf = k_inf;
  s.validate();
  return s;
}

GsmSpec GsmSpec::j2_power(double young, double poisson, double sigma0, double k, double m) {
  GsmSpec s;
  s.kind = GsmKind::J2Plastic;
  s.young = young;
  s.poisson = poisson;
  s.hardening.law = HardeningLaw::PowerLaw;
  s.hardening.sigma0 = sigma0;
  s.hardening.k = k;
  s.hardening.m = m;
  s.validate();
  return s;
}

void GsmSpec::validate() const {
  if (!(young > 0.0)) throw PreconditionError("material: Young's modulus must be positive");
  if (!(poisson > -1.0 && poisson < 0.5)) throw PreconditionError("material: Poisson ratio must lie in (-1, 0.5)");
  if (kind != GsmKind::J2Plastic) return;
  const HardeningParams& h = hardening;
  if (h.law == HardeningLaw::ExponentialLinear) {
    if (!(h.sigma0 >= 0.0 && h.sigma_inf >= h.sigma0 && h.k0 >= h.k_inf && h.k_inf >= 0.0)) {
      throw PreconditionError("material: require sigma_inf >= sigma0 >= 0 and k0 >= k_inf >= 0");
    }
  } else if (!(h.sigma0 >= 0.0 && h.k >= 0.0 && h.m > 0.0)) {
    throw PreconditionError("material: require sigma0 >= 0, k >= 0 and m > 0 for power-law hardening");
  }
}

GsmSpec polyamide_matrix() { return GsmSpec::j2_exponential(2100.0, 0.3, 29.0, 61.7, 10600.0, 139.0); }
GsmSpec glass_fiber() { return GsmSpec::elastic(72000.0, 0.22); }
GsmSpec aluminum() { return GsmSpec::j2_power(75000.0, 0.3, 75.0, 416.0, 0.3895); }

YieldValue hardening(double eps_p, const HardeningParams& h) {
  if (h.law == HardeningLaw::PowerLaw) {
    const double stress = h.sigma0 + h.k * std::pow(eps_p, h.m);
    const double slope = h.k * h.m * std::pow(std::max(eps_p, kPowerLawOffset), h.m - 1.0);
    return {stress, slope};
  }
  const double span = h.sigma_inf - h.sigma0;
  double stress = h.sigma0 + h.k_inf * eps_p;
  double slope = h.k_inf;
  if (span > 0.0) {
    const double decay = std::exp(-(h.k0 - h.k_inf) / span * eps_p);
    stress += span * (1.0 - decay);
    slope += (h.k0 - h.k_inf) * decay;
  }
  return {stress, slope};
}

namespace {

double stored_hardening_energy(double eps_p, const HardeningParams& h) {
  if (h.law == HardeningLaw::PowerLaw) return h.k * std::pow(eps_p, h.m + 1.0) / (h.m + 1.0);
  const double span = h.sigma_inf - h.sigma0;
  double energy = 0.5 * h.k_inf * eps_p * eps_p;
  if (span > 0.0 && h.k0 > h.k_inf) {
    const double rate = (h.k0 - h.k_inf) / span;
    energy += span * (eps_p + std::expm1(-rate * eps_p) / rate);
  }
  return energy;
}

/// Solves q_trial - 3 G dg - sigma_Y(eps_n + dg) = 0 for dg in (0, q_trial / 3G].
double solve_return_map(double q_trial, double shear, double eps_n, const HardeningParams& h, int& iterations) {
  double lo = 0.0;
  double hi = q_trial / (3.0 * shear);
  double dg = 0.0;
  double residual = q_trial - hardening(eps_n, h).stress;
  for (iterations = 1; iterations <= kReturnMapMaxIter; ++iterations) {
    const YieldValue y = hardening(eps_n + dg, h);
    residual = q_trial - 3.0 * shear * dg - y.stress;
    if (std::abs(residual) <= kReturnMapTol * q_trial) return dg;
    if (residual > 0.0) {
      lo = dg;
    } else {
      hi = dg;
    }
    double next = dg + residual / (3.0 * shear + y.slope);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * std::max(hi, 1e-300)) return next;
    dg = next;
  }
  std::ostringstream msg;
  msg << "J2 return map did not converge (yield residual " << residual << ", q_trial " << q_trial << ")";
  throw NumericError(msg.str());
}

}  // namespace

GsmResponse stress_and_tangent(const GsmSpec& spec, const GsmState& state_n, const SymMat& eps, double /*dt*/) {
  GsmResponse r;
  r.state = state_n;
  const Stiffness c = spec.elastic_stiffness();
  if (spec.kind == GsmKind::LinearElastic) {
    r.stress = c * eps;
    r.tangent = c;
    return r;
  }
  const auto [p1, p2] = iso_projectors();
  const double bulk = spec.bulk();
  const double shear = spec.shear();
  const SymMat elastic_strain = eps - state_n.plastic_strain;
  const SymMat dev_trial = 2.0 * shear * (p2 * elastic_strain);
  const double dev_norm = dev_trial.norm();
  const double q_trial = std::sqrt(1.5) * dev_norm;
  const double yield_n = hardening(state_n.eq_plastic_strain, spec.hardening).stress;
  if (q_trial - yield_n <= kReturnMapTol * std::max(yield_n, 1e-300)) {
    r.stress = c * elastic_strain;
    r.tangent = c;
    return r;
  }
  const double dg = solve_return_map(q_trial, shear, state_n.eq_plastic_strain, spec.hardening,
                                     r.return_map_iterations);
  const SymMat flow = dev_trial / dev_norm;
  r.state.plastic_strain = state_n.plastic_strain + dg * std::sqrt(1.5) * flow;
  r.state.eq_plastic_strain = state_n.eq_plastic_strain + dg;
  r.stress = c * (eps - r.state.plastic_strain);

  const double slope = hardening(r.state.eq_plastic_strain, spec.hardening).slope;
  const double theta = 1.0 - 3.0 * shear * dg / q_trial;
  const double theta_bar = 3.0 * shear / (3.0 * shear + slope) - (1.0 - theta);
  r.tangent = 3.0 * bulk * p1 + 2.0 * shear * theta * p2 - 2.0 * shear * theta_bar * flow * flow.transpose();
  return r;
}

double free_energy(const GsmSpec& spec, const GsmState& state, const SymMat& eps) {
  const SymMat elastic_strain = eps - state.plastic_strain;
  double energy = 0.5 * elastic_strain.dot(spec.elastic_stiffness() * elastic_strain);
  if (spec.kind == GsmKind::J2Plastic) energy += stored_hardening_energy(state.eq_plastic_strain, spec.hardening);
  return energy;
}

// ---------------------------------------------------------------------------

GsmSpec gsm_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    const double young = j.at("E").get<double>();
    const double poisson = j.at("nu").get<double>();
    if (kind == "elastic" || kind == "linear-elastic") return GsmSpec::elastic(young, poisson);
    if (kind != "j2" && kind != "j2-plastic") throw ConfigError("material: unknown kind '" + kind + "'");
    const std::string law = j.value("hardening", std::string("exponential-linear"));
    const double sigma0 = j.contains("sigma0") ? j["sigma0"].get<double>() : j.at("sigma_Y").get<double>();
    if (law == "power") {
      return GsmSpec::j2_power(young, poisson, sigma0, j.at("k").get<double>(), j.at("m").get<double>());
    }
    if (law != "exponential-linear") throw ConfigError("material: unknown hardening law '" + law + "'");
    return GsmSpec::j2_exponential(young, poisson, sigma0, j.at("sigma_inf").get<double>(),
                                   j.at("k0").get<double>(), j.at("k_inf").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("material: malformed description: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

std::string gsm_to_json_text(const GsmSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = spec.kind == GsmKind::LinearElastic ? "elastic" : "j2";
  j["E"] = spec.young;
  j["nu"] = spec.poisson;
  if (spec.kind == GsmKind::J2Plastic) {
    const HardeningParams& h = spec.hardening;
    if (h.law == HardeningLaw::PowerLaw) {
      j["hardening"] = "power";
      j["sigma0"] = h.sigma0;
      j["k"] = h.k;
      j["m"] = h.m;
    } else {
      j["hardening"] = "exponential-linear";
      j["sigma0"] = h.sigma0;
      j["sigma_inf"] = h.sigma_inf;
      j["k0"] = h.k0;
      j["k_inf"] = h.k_inf;
    }
  }
  return j.dump(2);
}

}  // namespace dmn
