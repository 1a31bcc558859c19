#include <cmath>

#include "jasmine/dataset.hpp"
#include "jasmine/random.hpp"

namespace jasmine {

namespace {

struct Cluster {
  std::vector<double> center;
  double scale;
  double weight;
};

std::vector<Cluster> make_clusters(Engine& rng, std::size_t k, double separation) {
  std::vector<Cluster> out;
  // Three common clusters and two rare, far-out ones per class.
  for (int c = 0; c < 5; ++c) {
    const bool rare = c >= 3;
    const double spread = rare ? 3.0 * separation : separation;
    Cluster cl;
    for (std::size_t j = 0; j < k; ++j) cl.center.push_back(uniform_real(rng, -spread, spread));
    cl.scale = uniform_real(rng, 0.5, 1.5);
    cl.weight = rare ? 0.03 : 0.98 / 3.0;
    out.push_back(std::move(cl));
  }
  return out;
}

}  // namespace

Dataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.rows == 0 || spec.features == 0) throw DataError("synthetic: empty spec");
  Engine rng = SeedPath(spec.seed).with("synthetic").engine();
  const auto benign = make_clusters(rng, spec.features, spec.separation);
  const auto malicious = make_clusters(rng, spec.features, spec.separation);

  Dataset out;
  out.name = "synthetic";
  for (std::size_t j = 0; j < spec.features; ++j) out.feature_names.push_back("f" + std::to_string(j));
  std::vector<double> values;
  values.reserve(spec.rows * spec.features);
  out.labels.reserve(spec.rows);

  for (std::size_t i = 0; i < spec.rows; ++i) {
    const bool is_malicious = uniform01(rng) < spec.malicious_fraction;
    const auto& clusters = is_malicious ? malicious : benign;
    double u = uniform01(rng);
    std::size_t c = 0;
    while (c + 1 < clusters.size() && u >= clusters[c].weight) {
      u -= clusters[c].weight;
      ++c;
    }
    for (std::size_t j = 0; j < spec.features; ++j) {
      values.push_back(clusters[c].center[j] + clusters[c].scale * standard_normal(rng));
    }
    Label y = is_malicious ? 1 : 0;
    if (uniform01(rng) < 0.01) y = 1 - y;
    out.labels.push_back(y);
  }
  out.features = FeatureMatrix(spec.rows, spec.features, std::move(values));
  return out;
}

}  // namespace jasmine
