#include "dmn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/random/sobol.hpp>

#include "dmn/error.hpp"

namespace dmn {

struct SobolSequence::Impl {
  explicit Impl(int dim) : engine(static_cast<std::size_t>(dim)) {}
  boost::random::sobol engine;
  std::vector<std::uint64_t> shift;
};

SobolSequence::SobolSequence(int dimension, std::uint64_t seed)
    : impl_(std::make_shared<Impl>(dimension)), dimension_(dimension) {
  if (dimension < 1) throw PreconditionError("Sobol dimension must be positive");
  impl_->shift.assign(dimension, 0);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    for (auto& s : impl_->shift) s = rng();
  }
}

std::vector<double> SobolSequence::next() {
  std::vector<double> u(dimension_);
  for (int d = 0; d < dimension_; ++d) {
    const std::uint64_t x = static_cast<std::uint64_t>(impl_->engine()) ^ impl_->shift[d];
    u[d] = static_cast<double>(x >> 11) * 0x1.0p-53;
  }
  return u;
}

namespace {

/// Inverts theta - sin(theta) = t on [0, pi] for t in [0, pi].
double invert_theta(double t) {
  double lo = 0.0, hi = kPi;
  for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid - std::sin(mid) < t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SampleParameters SampleParameters::from_unit_cube(const std::vector<double>& u) {
  if (u.size() != 8) throw PreconditionError("sample parameters need 8 unit-cube coordinates");
  SampleParameters p;
  p.a = u[0];
  p.e1 = -3.0 + 6.0 * u[1];
  p.e2 = -3.0 + 6.0 * u[2];
  p.e3 = -3.0 + 6.0 * u[3];
  p.beta = 2.0 * kPi * u[4];
  p.theta = invert_theta(kPi * u[5]);
  p.psi = std::acos(1.0 - 2.0 * u[6]);
  p.phi = 2.0 * kPi * u[7];
  return p;
}

Mat3 deviatoric_direction(double beta) {
  double c = std::cos(beta), s = std::sin(beta);
  if (std::abs(c + s) < 1e-9) {
    beta += 1e-9;
    c = std::cos(beta);
    s = std::sin(beta);
  }
  const double scale = 1.0 / std::sqrt((c * s + 1.0) / (2.0 * c * s + 1.0));
  const double denom = 2.0 * c + 2.0 * s;
  Mat3 n = Mat3::Zero();
  n(0, 0) = -kSqrt2 * c / denom;
  n(1, 1) = -kSqrt2 * s / denom;
  n(2, 2) = 1.0 / kSqrt2;
  return scale * n;
}

StiffnessSample make_sample(const SampleParameters& p) {
  StiffnessSample s;
  const double k1 = kReferenceBulk;
  const double g1 = kReferenceBulk * std::pow(10.0, p.e1);
  const double k2 = kReferenceBulk * std::pow(10.0, p.e2);
  const double g2 = kReferenceBulk * std::pow(10.0, p.e3);
  s.params = {k1, g1, k2, g2, p.a, p.beta, p.theta, p.psi, p.phi};
  const Vec3 axis(std::sin(p.psi) * std::cos(p.phi), std::sin(p.psi) * std::sin(p.phi), std::cos(p.psi));
  const Mat3 q = axis_angle_rotation(axis, p.theta);
  const SymMat n = to_mandel(q * deviatoric_direction(p.beta) * q.transpose());
  const auto [p1, p2] = iso_projectors();
  s.c1 = 3.0 * k1 * p1 + 2.0 * g1 * p2;
  s.c2 = 3.0 * k2 * p1 + 2.0 * g2 * (p2 - p.a * n * n.transpose());
  return s;
}

// ---------------------------------------------------------------------------

TriangleDiscretization triangle_discretization(int level) {
  if (level < 0 || level > 6) throw ConfigError("triangle subdivision level must lie in [0, 6]");
  TriangleDiscretization d;
  d.name = "level" + std::to_string(level);
  std::vector<Bary> known;
  auto add = [&](const Bary& b) {
    for (const Bary& k : known) {
      if (std::abs(k.phi1 - b.phi1) + std::abs(k.phi2 - b.phi2) + std::abs(k.phi3 - b.phi3) < 1e-12) return;
    }
    known.push_back(b);
    d.points.push_back(from_barycentric(b));
  };
  for (int l = 0; l <= level; ++l) {
    const int n = 1 << l;
    for (int i = n; i >= 0; --i) {
      for (int j = n - i; j >= 0; --j) {
        add({double(i) / n, double(j) / n, double(n - i - j) / n});
      }
    }
    // Centroids of the upward and downward sub-triangles.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; i + j < n; ++j) {
        const int k = n - 1 - i - j;
        add({(i + 1.0 / 3.0) / n, (j + 1.0 / 3.0) / n, (k + 1.0 / 3.0) / n});
        if (k > 0) add({(i + 2.0 / 3.0) / n, (j + 2.0 / 3.0) / n, (k - 1.0 / 3.0) / n});
      }
    }
  }
  return d;
}

TriangleDiscretization triangle_discretization(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  int level = -1;
  if (lower == "d4") level = 0;
  if (lower == "d10") level = 1;
  if (lower == "d31") level = 2;
  if (level < 0) throw ConfigError("unknown orientation discretization '" + name + "' (expected d4, d10 or d31)");
  TriangleDiscretization d = triangle_discretization(level);
  d.name = lower;
  return d;
}

std::vector<StiffnessSample> sample_stiffness_pairs(int count, std::uint64_t seed,
                                                    const TriangleDiscretization& disc) {
  if (count < 1) throw PreconditionError("sample count must be at least 1");
  if (disc.points.empty()) throw PreconditionError("orientation discretization is empty");
  SobolSequence sobol(8, seed);
  std::vector<StiffnessSample> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    StiffnessSample sample = make_sample(SampleParameters::from_unit_cube(sobol.next()));
    sample.point = disc.points[s % disc.points.size()];
    out.push_back(std::move(sample));
  }
  return out;
}

int default_sample_count(const std::string& discretization, bool desk) {
  const TriangleDiscretization d = triangle_discretization(discretization);
  int total = 0;
  if (d.name == "d4") total = 800;
  if (d.name == "d10") total = 1000;
  if (d.name == "d31") total = 1550;
  return desk ? (total + 2) / 4 : total;
}

}  // namespace dmn
