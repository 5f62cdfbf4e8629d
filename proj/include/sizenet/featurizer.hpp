#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sizenet/events.hpp"
#include "sizenet/image.hpp"

namespace sizenet {

// Everything needed to rebuild a projection matrix bit-for-bit.
struct ProjectionSpec {
  int input_dim = 0;
  int output_dim = 0;
  std::uint64_t seed = 0;
};

// Fixed random linear map v = (1/sqrt(input_dim)) R x with R_ij ~ N(0,1)
// drawn from the spec seed. Materialized once; apply() is pure, so the
// matrix can be shared freely afterwards.
class RandomProjection {
 public:
  explicit RandomProjection(const ProjectionSpec& spec);

  std::vector<double> apply(std::span<const double> x) const;
  const ProjectionSpec& spec() const { return spec_; }

 private:
  ProjectionSpec spec_;
  std::vector<double> matrix_;  // output_dim x input_dim, row-major
  double scale_ = 1.0;
};

// Flattens the image row-major and projects it. The projection's input_dim
// must equal side * side.
std::vector<double> featurize_image(const GrayImage& img,
                                    const RandomProjection& proj);

// CSV rows article_id,v1,...,vD (no header). All rows must agree on D;
// ragged rows, non-numeric values and duplicate ids are errors.
std::map<ArticleId, std::vector<double>> load_embeddings(
    const std::string& path);

}  // namespace sizenet
