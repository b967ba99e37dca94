#include "dmn/labeling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "dmn/error.hpp"

namespace dmn {

OrientationPoint generator_target(const OrientationPoint& p, double min_lambda3) {
  const OrientationPoint q = checked_orientation(p);
  const double l3 = q.l3();
  if (l3 >= min_lambda3 || q.l2 <= min_lambda3) return q;
  const double shift = 0.5 * (min_lambda3 - l3);
  return {q.l1 - shift, q.l2 - shift};
}

namespace {

int point_index(const TriangleDiscretization& disc, const OrientationPoint& p) {
  for (std::size_t j = 0; j < disc.points.size(); ++j) {
    if (std::abs(disc.points[j].l1 - p.l1) + std::abs(disc.points[j].l2 - p.l2) < 1e-12) return static_cast<int>(j);
  }
  return -1;
}

struct SlotResult {
  bool ok = false;
  Stiffness label;
  int iterations = 0;
  double asymmetry = 0.0;
  std::string message;
};

}  // namespace

LabelReport build_training_labels(const TriangleDiscretization& disc, std::vector<StiffnessSample>& samples,
                                  const LabelConfig& cfg) {
  if (cfg.threads < 1) throw ConfigError("labeling: thread count must be at least 1");
  LabelReport rep;
  std::vector<int> owner(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    owner[s] = point_index(disc, samples[s].point);
    if (owner[s] < 0) {
      throw PreconditionError("labeling: sample " + std::to_string(s) + " lies off the orientation discretization");
    }
  }
  for (std::size_t j = 0; j < disc.points.size(); ++j) {
    const OrientationPoint target = generator_target(disc.points[j], cfg.min_lambda3);
    rep.generated_targets.push_back(target);
    rep.microstructures.push_back(generate_microstructure(target, cfg.generator, cfg.seed + 1000003ULL * j));
  }

  std::vector<SlotResult> results(samples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    FftHomogenizer solver(cfg.generator.grid);
    for (;;) {
      const std::size_t s = next.fetch_add(1);
      if (s >= samples.size()) return;
      SlotResult& out = results[s];
      try {
        const FftResult r = solver.solve(rep.microstructures[owner[s]], samples[s].c2, samples[s].c1, cfg.fft);
        out.label = r.stiffness;
        out.iterations = *std::max_element(r.iterations.begin(), r.iterations.end());
        out.asymmetry = r.asymmetry;
        out.ok = out.label.allFinite();
        if (!out.ok) out.message = "non-finite effective stiffness";
      } catch (const Error& e) {
        out.message = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(samples.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<StiffnessSample> kept;
  kept.reserve(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (results[s].ok) {
      samples[s].label = results[s].label;
      rep.max_iterations = std::max(rep.max_iterations, results[s].iterations);
      rep.max_asymmetry = std::max(rep.max_asymmetry, results[s].asymmetry);
      kept.push_back(std::move(samples[s]));
    } else {
      rep.dropped.push_back(static_cast<int>(s));
      rep.messages.push_back("sample " + std::to_string(s) + ": " + results[s].message);
    }
  }
  samples = std::move(kept);
  return rep;
}

}  // namespace dmn
