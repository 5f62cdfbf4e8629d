#include "sizenet/featurizer.hpp"

#include <cmath>
#include <stdexcept>

#include "sizenet/csv.hpp"
#include "sizenet/rng.hpp"

namespace sizenet {

RandomProjection::RandomProjection(const ProjectionSpec& spec) : spec_(spec) {
  if (spec.input_dim < 1 || spec.output_dim < 1) {
    throw std::invalid_argument("projection dims must be >= 1");
  }
  matrix_.resize(static_cast<std::size_t>(spec.output_dim) * spec.input_dim);
  Rng rng(spec.seed);
  for (auto& m : matrix_) m = rng.normal();
  scale_ = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
}

std::vector<double> RandomProjection::apply(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(spec_.input_dim)) {
    throw std::invalid_argument(
        "projection input has dim " + std::to_string(x.size()) + ", expected " +
        std::to_string(spec_.input_dim));
  }
  std::vector<double> out(spec_.output_dim, 0.0);
  const std::size_t in_dim = static_cast<std::size_t>(spec_.input_dim);
  for (int r = 0; r < spec_.output_dim; ++r) {
    const double* row = matrix_.data() + static_cast<std::size_t>(r) * in_dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < in_dim; ++c) acc += row[c] * x[c];
    out[r] = acc * scale_;
  }
  return out;
}

std::vector<double> featurize_image(const GrayImage& img,
                                    const RandomProjection& proj) {
  return proj.apply(img.pixels);
}

std::map<ArticleId, std::vector<double>> load_embeddings(
    const std::string& path) {
  std::map<ArticleId, std::vector<double>> out;
  std::size_t dim = 0;
  for (const auto& line : read_lines(path)) {
    const auto fields = split_fields(line.text);
    const std::string where = path + ":" + std::to_string(line.number);
    if (fields.size() < 2) {
      throw std::runtime_error(where + ": expected article_id,v1,... in '" +
                               line.text + "'");
    }
    if (fields[0].empty()) throw std::runtime_error(where + ": empty article id");
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      throw std::runtime_error(where + ": row has " +
                               std::to_string(fields.size() - 1) +
                               " values, expected " + std::to_string(dim));
    }
    std::vector<double> values;
    values.reserve(dim);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      values.push_back(parse_double(fields[i], where));
    }
    if (!out.emplace(fields[0], std::move(values)).second) {
      throw std::runtime_error(where + ": duplicate article id '" + fields[0] +
                               "'");
    }
  }
  return out;
}

}  // namespace sizenet
