#include "tagbook/reduce.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tagbook {

ReducedVocabulary select_frequent(const SourceCorpus& corpus, std::size_t target) {
  const auto& vocab = corpus.vocabulary();
  const std::size_t m = vocab.size();
  if (target > m)
    throw SizeTooLarge("cannot keep " + std::to_string(target) + " of " + std::to_string(m) +
                       " tags");
  const auto& df = corpus.document_frequency();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (df[a] != df[b])
      return df[a] > df[b];
    return vocab[a] < vocab[b];
  });
  order.resize(target);
  std::sort(order.begin(), order.end());
  return {std::move(order), m, vocab.hash()};
}

TagVocabulary reduced_tags(const TagVocabulary& parent, const ReducedVocabulary& reduced) {
  if (reduced.parent_size != parent.size())
    throw DimensionMismatch("reduced vocabulary was built for a different parent");
  std::vector<std::string> tags;
  tags.reserve(reduced.size());
  for (auto i : reduced.selected)
    tags.push_back(parent[i]);
  return TagVocabulary(std::move(tags));
}

TagVector project_vocabulary(std::span<const double> vector, const ReducedVocabulary& reduced) {
  if (vector.size() != reduced.parent_size)
    throw DimensionMismatch("vector has length " + std::to_string(vector.size()) +
                            ", reduced vocabulary expects " +
                            std::to_string(reduced.parent_size));
  TagVector out;
  out.reserve(reduced.size());
  for (auto i : reduced.selected)
    out.push_back(vector[i]);
  return out;
}

PcaModel pca_fit(std::span<const TagVector> vectors, std::size_t target) {
  const std::size_t count = vectors.size();
  if (count < 2)
    throw InsufficientData("PCA needs at least two vectors");
  const std::size_t m = vectors.front().size();
  if (target == 0)
    throw InvalidArgument("PCA target size must be positive");
  if (target > m)
    throw SizeTooLarge("cannot keep " + std::to_string(target) + " components of " +
                       std::to_string(m) + " dimensions");
  if (target > count - 1)
    throw InsufficientData(std::to_string(count) + " vectors support at most " +
                           std::to_string(count - 1) + " components");

  Eigen::MatrixXd x(count, m);
  for (std::size_t r = 0; r < count; ++r) {
    if (vectors[r].size() != m)
      throw DimensionMismatch("PCA input vectors have differing lengths");
    for (std::size_t c = 0; c < m; ++c)
      x(r, c) = vectors[r][c];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const auto& singular = svd.singularValues();
  const Eigen::MatrixXd& axes = svd.matrixV();

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + m);
  model.components.resize(target * m);
  model.explained_variance.resize(target);
  const double dof = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < target; ++i) {
    const auto col = axes.col(static_cast<Eigen::Index>(i));
    Eigen::Index peak = 0;
    col.cwiseAbs().maxCoeff(&peak);
    const double sign = col(peak) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < m; ++c)
      model.components[i * m + c] = sign * col(static_cast<Eigen::Index>(c));
    const double s = singular(static_cast<Eigen::Index>(i));
    model.explained_variance[i] = s * s / dof;
  }
  return model;
}

TagVector pca_project(std::span<const double> vector, const PcaModel& model) {
  const std::size_t m = model.input_dim();
  if (vector.size() != m)
    throw DimensionMismatch("vector has length " + std::to_string(vector.size()) +
                            ", PCA model expects " + std::to_string(m));
  TagVector out(model.output_dim(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto axis = model.component(i);
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c)
      s += axis[c] * (vector[c] - model.mean[c]);
    out[i] = s;
  }
  return out;
}

TagVector pca_reconstruct(std::span<const double> coords, const PcaModel& model) {
  if (coords.size() != model.output_dim())
    throw DimensionMismatch("coordinate vector has length " + std::to_string(coords.size()) +
                            ", PCA model has " + std::to_string(model.output_dim()) +
                            " components");
  TagVector out = model.mean;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto axis = model.component(i);
    for (std::size_t c = 0; c < out.size(); ++c)
      out[c] += coords[i] * axis[c];
  }
  return out;
}

} // namespace tagbook
