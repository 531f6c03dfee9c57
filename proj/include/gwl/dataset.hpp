#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gwl {

enum class Task { classification, regression };

enum class FileFormat { csv, libsvm };

/// Read-only row-major view over l feature vectors of dimension d.
class FeatureView {
public:
  FeatureView() = default;
  FeatureView(std::span<const double> data, std::size_t dim)
      : data_(data), dim_(dim) {}

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return data_.subspan(i * dim_, dim_);
  }
  std::span<const double> data() const { return data_; }

private:
  std::span<const double> data_;
  std::size_t dim_ = 0;
};

/// Labeled samples stored row-major. For classification y holds exactly -1
/// or +1; for regression it holds the real target.
struct Dataset {
  Task task = Task::classification;
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::size_t removed_duplicates = 0;
  std::size_t removed_inconsistent = 0;
  /// Original label strings mapped to -1 and +1 (classification only).
  std::string negative_label;
  std::string positive_label;

  std::size_t size() const { return y.size(); }
  bool empty() const { return y.empty(); }
  FeatureView features() const { return {x, dim}; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(x).subspan(i * dim, dim);
  }

  /// Appends one sample; the row length must equal dim.
  void push_back(std::span<const double> features, double label);

  /// Copies the listed samples, in order, into a new dataset.
  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct LoadOptions {
  FileFormat format = FileFormat::csv;
  Task task = Task::classification;
  bool header = false;
  /// Column holding the label; negative counts from the end (-1 = last).
  int label_column = -1;
  /// Explicit label mapping, e.g. {"g", +1}, {"b", -1}. Empty means the
  /// default mapping: the smaller of the two label values maps to -1
  /// (numeric order when both parse as numbers, lexicographic otherwise).
  std::map<std::string, int> label_map;
};

/// Parses "g:+1,b:-1" into a label map.
std::map<std::string, int> parse_label_map(const std::string& spec);

Dataset load(const std::string& path, const LoadOptions& options);
Dataset parse(std::istream& in, const LoadOptions& options);

/// Collapses duplicate samples and, for classification, drops every group of
/// identical feature vectors carrying conflicting labels. Feature equality is
/// exact. Output keeps the first-occurrence order of surviving samples.
Dataset clean(const Dataset& ds);

/// Deterministic permutation of the samples for a given seed.
Dataset shuffle(const Dataset& ds, std::uint64_t seed);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;
  std::uint64_t seed = 0;

  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> test_indices(std::size_t fold) const;
};

/// Balanced k-fold split: fold sizes differ by at most one.
FoldAssignment kfold(std::size_t l, std::size_t k, std::uint64_t seed);

/// Per-feature z-scoring. Fitted on one split and applied to others so that
/// no statistics leak from held-out data. Constant features get scale 1.
class Standardizer {
public:
  static Standardizer fit(const Dataset& train);
  Dataset apply(const Dataset& ds) const;
  void apply_row(std::span<double> row) const;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace gwl
