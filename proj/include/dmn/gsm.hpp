#pragma once

// Generalized standard material kernels: linear elasticity and small-strain
// J2 elastoplasticity with isotropic hardening, integrated by implicit Euler
// (radial return). Each kernel returns the condensed-energy stress, the
// consistent tangent and the trial internal state.

#include <string>

#include "dmn/mech.hpp"

namespace dmn {

enum class GsmKind { LinearElastic, J2Plastic };
enum class HardeningLaw { ExponentialLinear, PowerLaw };

struct HardeningParams {
  HardeningLaw law = HardeningLaw::ExponentialLinear;
  double sigma0 = 0.0;     // initial yield stress [MPa]
  double sigma_inf = 0.0;  // saturation stress (exponential-linear) [MPa]
  double k0 = 0.0;         // initial hardening modulus [MPa]
  double k_inf = 0.0;      // asymptotic hardening modulus [MPa]
  double k = 0.0;          // power-law coefficient [MPa]
  double m = 1.0;          // power-law exponent
};

struct GsmSpec {
  GsmKind kind = GsmKind::LinearElastic;
  double young = 1.0;    // [MPa]
  double poisson = 0.0;
  HardeningParams hardening;

  double bulk() const { return young / (3.0 * (1.0 - 2.0 * poisson)); }
  double shear() const { return young / (2.0 * (1.0 + poisson)); }
  Stiffness elastic_stiffness() const { return isotropic_from_young(young, poisson); }

  static GsmSpec elastic(double young, double poisson);
  static GsmSpec j2_exponential(double young, double poisson, double sigma0, double sigma_inf, double k0,
                                double k_inf);
  static GsmSpec j2_power(double young, double poisson, double sigma0, double k, double m);

  /// Throws PreconditionError on inadmissible parameters.
  void validate() const;
};

/// Matrix / fiber parameters of the short glass fiber reinforced polyamide.
GsmSpec polyamide_matrix();
GsmSpec glass_fiber();
/// Aluminum plate with power-law hardening.
GsmSpec aluminum();

struct GsmState {
  SymMat plastic_strain = SymMat::Zero();  // deviatoric
  double eq_plastic_strain = 0.0;
};

struct GsmResponse {
  SymMat stress;
  Stiffness tangent;
  GsmState state;  // trial state; becomes the converged state on commit
  int return_map_iterations = 0;
};

/// Yield stress and its derivative at accumulated plastic strain eps_p >= 0.
struct YieldValue {
  double stress;
  double slope;
};
YieldValue hardening(double eps_p, const HardeningParams& params);

/// dt is unused by the rate-independent kernels.
GsmResponse stress_and_tangent(const GsmSpec& spec, const GsmState& state_n, const SymMat& eps, double dt = 1.0);

inline GsmState commit(const GsmResponse& response) { return response.state; }

/// Helmholtz free energy (elastic + stored hardening energy).
double free_energy(const GsmSpec& spec, const GsmState& state, const SymMat& eps);

/// Reads a material description ({"kind": "elastic"|"j2", "E", "nu", ...}).
GsmSpec gsm_from_json_text(const std::string& text);
std::string gsm_to_json_text(const GsmSpec& spec);

}  // namespace dmn
