#include <algorithm>
#include <limits>
#include <numeric>

#include "dive/error.hpp"
#include "dive/random.hpp"
#include "dive/sbow.hpp"

namespace dive {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double d = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

std::uint32_t nearest(const double* x, const std::vector<double>& centers, std::size_t k,
                      std::size_t dim) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double d = squared_distance(x, centers.data() + c * dim, dim);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

}  // namespace

KMeansResult mini_batch_kmeans(std::span<const double> points, std::size_t dim,
                               const KMeansOptions& options) {
  const std::size_t k = options.clusters;
  if (k == 0 || dim == 0) throw ConfigError("k-means needs positive cluster count and dimension");
  if (points.size() % dim != 0) throw InternalError("point buffer not a multiple of dim");
  const std::size_t n = points.size() / dim;
  if (n == 0) throw ConfigError("k-means needs at least one point");

  Rng rng(options.seed);
  KMeansResult result;
  result.dim = dim;
  result.centers.assign(k * dim, 0.0);
  auto point = [&](std::size_t i) { return points.data() + i * dim; };
  auto set_center = [&](std::size_t c, std::size_t i) {
    std::copy(point(i), point(i) + dim, result.centers.begin() + static_cast<std::ptrdiff_t>(c * dim));
  };

  // k-means++ seeding on a random sample.
  std::vector<std::size_t> sample(n);
  std::iota(sample.begin(), sample.end(), std::size_t{0});
  if (n > options.seeding_sample) {
    for (std::size_t i = 0; i < options.seeding_sample; ++i) {
      std::swap(sample[i], sample[i + rng.below(n - i)]);
    }
    sample.resize(options.seeding_sample);
  }
  std::vector<double> d2(sample.size(), std::numeric_limits<double>::infinity());
  set_center(0, sample[rng.below(sample.size())]);
  for (std::size_t c = 1; c < k; ++c) {
    double sum = 0.0;
    for (std::size_t s = 0; s < sample.size(); ++s) {
      d2[s] = std::min(d2[s], squared_distance(point(sample[s]), result.centers.data() + (c - 1) * dim, dim));
      sum += d2[s];
    }
    std::size_t pick = sample[rng.below(sample.size())];
    if (sum > 0.0) {
      double target = rng.uniform() * sum;
      for (std::size_t s = 0; s < sample.size(); ++s) {
        target -= d2[s];
        if (target <= 0.0) {
          pick = sample[s];
          break;
        }
      }
    }
    set_center(c, pick);
  }

  // Mini-batch updates with per-center learning rate 1/count.
  std::vector<std::uint64_t> counts(k, 0);
  std::vector<std::size_t> batch(options.batch_size);
  std::vector<std::uint32_t> cached(options.batch_size);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    for (std::size_t b = 0; b < batch.size(); ++b) {
      batch[b] = rng.below(n);
      cached[b] = nearest(point(batch[b]), result.centers, k, dim);
    }
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto c = cached[b];
      const double eta = 1.0 / static_cast<double>(++counts[c]);
      double* center = result.centers.data() + c * dim;
      const double* x = point(batch[b]);
      for (std::size_t i = 0; i < dim; ++i) center[i] = (1.0 - eta) * center[i] + eta * x[i];
    }
  }

  result.assignment.resize(n);
  std::vector<std::size_t> members(k);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::fill(members.begin(), members.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      result.assignment[i] = nearest(point(i), result.centers, k, dim);
      ++members[result.assignment[i]];
    }
    bool reseeded = false;
    if (n >= k) {
      for (std::size_t c = 0; c < k; ++c) {
        if (members[c] == 0) {
          set_center(c, rng.below(n));
          ++result.reseeded;
          reseeded = true;
        }
      }
    }
    if (!reseeded) break;
  }
  return result;
}

}  // namespace dive
