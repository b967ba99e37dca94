#include "dmn/fft.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "dmn/error.hpp"

namespace dmn {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FftHomogenizer::Impl {
  std::array<int, 3> dims;
  std::size_t n_real = 0;
  std::size_t n_cplx = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> normal;  // unit modified wave vector per frequency (zero where undefined)

  explicit Impl(std::array<int, 3> d) : dims(d) {
    for (int n : d) {
      if (n < 1) throw PreconditionError("FFT grid dimensions must be positive");
    }
    n_real = static_cast<std::size_t>(d[0]) * d[1] * d[2];
    const int half = d[2] / 2 + 1;
    n_cplx = static_cast<std::size_t>(d[0]) * d[1] * half;
    real = fftw_alloc_real(6 * n_real);
    spec = fftw_alloc_complex(6 * n_cplx);
    if (!real || !spec) throw NumericError("FFT: allocation failed");
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      const int n[3] = {d[0], d[1], d[2]};
      forward = fftw_plan_many_dft_r2c(3, n, 6, real, nullptr, 1, static_cast<int>(n_real), spec, nullptr, 1,
                                       static_cast<int>(n_cplx), FFTW_ESTIMATE);
      backward = fftw_plan_many_dft_c2r(3, n, 6, spec, nullptr, 1, static_cast<int>(n_cplx), real, nullptr, 1,
                                        static_cast<int>(n_real), FFTW_ESTIMATE);
    }
    if (!forward || !backward) throw NumericError("FFT: plan creation failed");

    normal.assign(3 * n_cplx, 0.0);
    for (int i = 0; i < d[0]; ++i) {
      for (int j = 0; j < d[1]; ++j) {
        for (int k = 0; k < half; ++k) {
          const double xi[3] = {2.0 * kPi * i / d[0], 2.0 * kPi * j / d[1], 2.0 * kPi * k / d[2]};
          double kappa[3];
          for (int a = 0; a < 3; ++a) {
            kappa[a] = std::sin(0.5 * xi[a]);
            for (int b = 0; b < 3; ++b) {
              if (b != a) kappa[a] *= std::cos(0.5 * xi[b]);
            }
          }
          const double len = std::sqrt(kappa[0] * kappa[0] + kappa[1] * kappa[1] + kappa[2] * kappa[2]);
          if (len < 1e-12) continue;
          const std::size_t f = (static_cast<std::size_t>(i) * d[1] + j) * half + k;
          for (int a = 0; a < 3; ++a) normal[3 * f + a] = kappa[a] / len;
        }
      }
    }
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }

  /// out = P (C in), both 6 x n_real (component-major).
  void apply(const std::vector<std::uint8_t>& phase, const Stiffness* c, const double* in, double* out) {
    for (std::size_t v = 0; v < n_real; ++v) {
      const Stiffness& cv = c[phase[v]];
      double e[6];
      for (int a = 0; a < 6; ++a) e[a] = in[a * n_real + v];
      for (int a = 0; a < 6; ++a) {
        double s = 0.0;
        for (int b = 0; b < 6; ++b) s += cv(a, b) * e[b];
        real[a * n_real + v] = s;
      }
    }
    project_real(out);
  }

  /// Projects the contents of `real` onto compatible fields and writes to out.
  void project_real(double* out) {
    fftw_execute(forward);
    const double inv_sqrt2 = 1.0 / kSqrt2;
    for (std::size_t f = 0; f < n_cplx; ++f) {
      const double* n = &normal[3 * f];
      if (n[0] == 0.0 && n[1] == 0.0 && n[2] == 0.0) {
        for (int a = 0; a < 6; ++a) spec[a * n_cplx + f][0] = spec[a * n_cplx + f][1] = 0.0;
        continue;
      }
      for (int part = 0; part < 2; ++part) {
        double m[6];
        for (int a = 0; a < 6; ++a) m[a] = spec[a * n_cplx + f][part];
        const double e[3][3] = {{m[0], m[5] * inv_sqrt2, m[4] * inv_sqrt2},
                                {m[5] * inv_sqrt2, m[1], m[3] * inv_sqrt2},
                                {m[4] * inv_sqrt2, m[3] * inv_sqrt2, m[2]}};
        double t[3];
        for (int a = 0; a < 3; ++a) t[a] = e[a][0] * n[0] + e[a][1] * n[1] + e[a][2] * n[2];
        const double s = t[0] * n[0] + t[1] * n[1] + t[2] * n[2];
        auto comp = [&](int a, int b) { return t[a] * n[b] + n[a] * t[b] - s * n[a] * n[b]; };
        spec[0 * n_cplx + f][part] = comp(0, 0);
        spec[1 * n_cplx + f][part] = comp(1, 1);
        spec[2 * n_cplx + f][part] = comp(2, 2);
        spec[3 * n_cplx + f][part] = kSqrt2 * comp(1, 2);
        spec[4 * n_cplx + f][part] = kSqrt2 * comp(0, 2);
        spec[5 * n_cplx + f][part] = kSqrt2 * comp(0, 1);
      }
    }
    fftw_execute(backward);
    const double scale = 1.0 / static_cast<double>(n_real);
    for (std::size_t k = 0; k < 6 * n_real; ++k) out[k] = real[k] * scale;
  }
};

FftHomogenizer::FftHomogenizer(std::array<int, 3> dims) : impl_(std::make_unique<Impl>(dims)) {}
FftHomogenizer::~FftHomogenizer() = default;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

FftResult FftHomogenizer::solve(const VoxelMicrostructure& ms, const Stiffness& c_matrix, const Stiffness& c_fiber,
                                const FftSolveConfig& cfg) {
  Impl& im = *impl_;
  if (ms.dims != im.dims || ms.phase.size() != im.n_real) {
    throw PreconditionError("FFT: microstructure does not match the solver grid");
  }
  if (!(cfg.tolerance > 0.0)) throw ConfigError("FFT: tolerance must be positive");
  for (auto p : ms.phase) {
    if (p > 1) throw PreconditionError("FFT: phase index out of range");
  }
  const Stiffness c[2] = {c_matrix, c_fiber};
  const std::size_t n = 6 * im.n_real;
  std::vector<double> x(n), r(n), p(n), q(n);
  FftResult res;
  Stiffness cbar = Stiffness::Zero();

  for (int load = 0; load < 6; ++load) {
    // r = b = -P C E for the unit macroscopic strain E = e_load.
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(x.begin() + load * im.n_real, x.begin() + (load + 1) * im.n_real, 1.0);
    im.apply(ms.phase, c, x.data(), r.data());
    for (double& v : r) v = -v;
    std::fill(x.begin(), x.end(), 0.0);
    const double b_norm = std::sqrt(dot(r, r));
    double rr = b_norm * b_norm;
    p = r;
    int it = 0;
    while (std::sqrt(rr) > cfg.tolerance * b_norm) {
      if (it == cfg.max_iterations) {
        throw NumericError("FFT: conjugate gradients did not converge in " + std::to_string(cfg.max_iterations) +
                           " iterations (relative residual " + std::to_string(std::sqrt(rr) / b_norm) +
                           ", load case " + std::to_string(load) + ")");
      }
      im.apply(ms.phase, c, p.data(), q.data());
      const double pq = dot(p, q);
      if (!(pq > 0.0)) throw NumericError("FFT: operator lost positive definiteness (phase stiffness not SPD?)");
      const double alpha = rr / pq;
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * q[k];
      }
      const double rr_new = dot(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
      ++it;
    }
    res.iterations[load] = it;
    res.residuals[load] = b_norm > 0.0 ? std::sqrt(rr) / b_norm : 0.0;

    SymMat mean = SymMat::Zero();
    for (std::size_t v = 0; v < im.n_real; ++v) {
      SymMat e;
      for (int a = 0; a < 6; ++a) e[a] = x[a * im.n_real + v];
      e[load] += 1.0;
      mean += c[ms.phase[v]] * e;
    }
    cbar.col(load) = mean / static_cast<double>(im.n_real);
  }
  res.asymmetry = (cbar - cbar.transpose()).norm() / std::max(cbar.norm(), 1e-300);
  res.stiffness = 0.5 * (cbar + cbar.transpose());
  return res;
}

FftResult effective_stiffness_fft(const VoxelMicrostructure& ms, const Stiffness& c_matrix, const Stiffness& c_fiber,
                                  const FftSolveConfig& config) {
  FftHomogenizer solver(ms.dims);
  return solver.solve(ms, c_matrix, c_fiber, config);
}

std::pair<double, double> hashin_shtrikman_bulk(double k1, double g1, double k2, double g2, double c1) {
  auto bound = [&](double g_ref) {
    const double a = 4.0 / 3.0 * g_ref;
    return 1.0 / (c1 / (k1 + a) + (1.0 - c1) / (k2 + a)) - a;
  };
  return {bound(std::min(g1, g2)), bound(std::max(g1, g2))};
}

}  // namespace dmn
