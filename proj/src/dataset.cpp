#include "gwl/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gwl/error.hpp"
#include "gwl/random.hpp"

namespace gwl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"'");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"'");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool try_parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double parse_real(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  if (!try_parse_double(s, v) || !std::isfinite(v))
    throw Error(fmt::format("line {}: cannot parse '{}' as a finite number", line_no, s));
  // Fold -0.0 onto +0.0 so that bitwise feature equality matches value equality.
  return v + 0.0;
}

struct RawRow {
  std::vector<double> features;
  std::string label;
  std::size_t line_no = 0;
};

std::map<std::string, int> default_label_map(const std::set<std::string>& labels) {
  if (labels.size() != 2)
    throw Error(fmt::format(
        "classification needs exactly two label values without an explicit mapping, found {}",
        labels.size()));
  std::string lo = *labels.begin();
  std::string hi = *labels.rbegin();
  double a = 0.0, b = 0.0;
  if (try_parse_double(lo, a) && try_parse_double(hi, b) && b < a) std::swap(lo, hi);
  return {{lo, -1}, {hi, +1}};
}

Dataset finish(std::vector<RawRow> rows, std::size_t dim, const LoadOptions& options) {
  if (rows.empty()) throw Error("no samples");
  Dataset ds;
  ds.task = options.task;
  ds.dim = dim;
  ds.x.reserve(rows.size() * dim);
  ds.y.reserve(rows.size());

  if (options.task == Task::regression) {
    for (const auto& r : rows) ds.push_back(r.features, parse_real(r.label, r.line_no));
    return ds;
  }

  auto mapping = options.label_map;
  if (mapping.empty()) {
    std::set<std::string> labels;
    for (const auto& r : rows) labels.insert(r.label);
    mapping = default_label_map(labels);
  }
  for (const auto& [name, value] : mapping) {
    if (value == -1 && ds.negative_label.empty()) ds.negative_label = name;
    if (value == +1 && ds.positive_label.empty()) ds.positive_label = name;
  }
  for (const auto& r : rows) {
    const auto it = mapping.find(r.label);
    if (it == mapping.end())
      throw Error(fmt::format("line {}: unmappable label '{}'", r.line_no, r.label));
    ds.push_back(r.features, it->second);
  }
  return ds;
}

Dataset parse_csv(std::istream& in, const LoadOptions& options) {
  std::vector<RawRow> rows;
  std::size_t dim = 0;
  std::size_t fields_expected = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#' || line.front() == '@') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields_expected == 0) {
      if (fields.size() < 2)
        throw Error(fmt::format("line {}: need at least one feature and a label", line_no));
      fields_expected = fields.size();
      dim = fields_expected - 1;
    } else if (fields.size() != fields_expected) {
      throw Error(fmt::format("line {}: expected {} fields, got {}", line_no,
                              fields_expected, fields.size()));
    }
    const int n = static_cast<int>(fields.size());
    const int label_col = options.label_column < 0 ? n + options.label_column
                                                   : options.label_column;
    if (label_col < 0 || label_col >= n)
      throw Error(fmt::format("line {}: label column {} out of range", line_no,
                              options.label_column));
    RawRow row;
    row.line_no = line_no;
    row.features.reserve(dim);
    for (int c = 0; c < n; ++c) {
      if (c == label_col)
        row.label = std::string(fields[c]);
      else
        row.features.push_back(parse_real(fields[c], line_no));
    }
    rows.push_back(std::move(row));
  }
  return finish(std::move(rows), dim, options);
}

Dataset parse_libsvm(std::istream& in, const LoadOptions& options) {
  struct Sparse {
    std::vector<std::pair<std::size_t, double>> entries;
    std::string label;
    std::size_t line_no;
  };
  std::vector<Sparse> sparse;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    std::istringstream tokens(line);
    Sparse s;
    s.line_no = line_no;
    tokens >> s.label;
    std::string tok;
    std::size_t last_index = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw Error(fmt::format("line {}: expected index:value, got '{}'", line_no, tok));
      std::size_t index = 0;
      const auto idx = std::string_view(tok).substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
      if (ec != std::errc() || ptr != idx.data() + idx.size() || index == 0)
        throw Error(fmt::format("line {}: bad feature index '{}'", line_no, idx));
      if (index <= last_index)
        throw Error(fmt::format("line {}: feature indices must increase", line_no));
      last_index = index;
      s.entries.emplace_back(index - 1, parse_real(std::string_view(tok).substr(colon + 1), line_no));
      dim = std::max(dim, index);
    }
    sparse.push_back(std::move(s));
  }
  if (!sparse.empty() && dim == 0) throw Error("libsvm input has no features");
  std::vector<RawRow> rows;
  rows.reserve(sparse.size());
  for (auto& s : sparse) {
    RawRow r;
    r.features.assign(dim, 0.0);
    for (const auto& [i, v] : s.entries) r.features[i] = v;
    r.label = std::move(s.label);
    r.line_no = s.line_no;
    rows.push_back(std::move(r));
  }
  return finish(std::move(rows), dim, options);
}

std::vector<std::uint64_t> bit_key(std::span<const double> row) {
  std::vector<std::uint64_t> key(row.size());
  std::transform(row.begin(), row.end(), key.begin(),
                 [](double v) { return std::bit_cast<std::uint64_t>(v); });
  return key;
}

}  // namespace

void Dataset::push_back(std::span<const double> features, double label) {
  if (features.size() != dim)
    throw Error(fmt::format("sample has {} features, dataset dimension is {}",
                            features.size(), dim));
  if (task == Task::classification && label != -1.0 && label != 1.0)
    throw Error(fmt::format("classification label must be -1 or +1, got {}", label));
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(label);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.task = task;
  out.dim = dim;
  out.removed_duplicates = removed_duplicates;
  out.removed_inconsistent = removed_inconsistent;
  out.negative_label = negative_label;
  out.positive_label = positive_label;
  out.x.reserve(indices.size() * dim);
  out.y.reserve(indices.size());
  for (auto i : indices) {
    if (i >= size()) throw Error(fmt::format("sample index {} out of range", i));
    out.push_back(row(i), y[i]);
  }
  return out;
}

std::map<std::string, int> parse_label_map(const std::string& spec) {
  std::map<std::string, int> out;
  for (auto item : split(spec, ',')) {
    const auto colon = item.rfind(':');
    if (item.empty() || colon == std::string_view::npos)
      throw Error(fmt::format("bad label mapping '{}', expected name:+1 or name:-1", item));
    const auto name = std::string(trim(item.substr(0, colon)));
    const auto value = trim(item.substr(colon + 1));
    int v = 0;
    if (value == "+1" || value == "1")
      v = 1;
    else if (value == "-1")
      v = -1;
    else
      throw Error(fmt::format("bad label mapping '{}', value must be +1 or -1", item));
    out[name] = v;
  }
  return out;
}

Dataset parse(std::istream& in, const LoadOptions& options) {
  return options.format == FileFormat::csv ? parse_csv(in, options)
                                           : parse_libsvm(in, options);
}

Dataset load(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return parse(in, options);
}

Dataset clean(const Dataset& ds) {
  std::map<std::vector<std::uint64_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto key = bit_key(ds.row(i));
    if (ds.task == Task::regression) key.push_back(std::bit_cast<std::uint64_t>(ds.y[i]));
    groups[std::move(key)].push_back(i);
  }

  std::vector<char> keep(ds.size(), 0);
  std::size_t duplicates = 0;
  std::size_t inconsistent = 0;
  for (const auto& [key, members] : groups) {
    const bool conflicting = std::any_of(members.begin(), members.end(), [&](std::size_t i) {
      return ds.y[i] != ds.y[members.front()];
    });
    if (conflicting) {
      inconsistent += members.size();
    } else {
      keep[members.front()] = 1;
      duplicates += members.size() - 1;
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (keep[i]) kept.push_back(i);
  Dataset out = ds.subset(kept);
  out.removed_duplicates = ds.removed_duplicates + duplicates;
  out.removed_inconsistent = ds.removed_inconsistent + inconsistent;
  return out;
}

Dataset shuffle(const Dataset& ds, std::uint64_t seed) {
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return ds.subset(order);
}

FoldAssignment kfold(std::size_t l, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(fmt::format("k-fold needs k >= 2, got {}", k));
  if (k > l) throw Error(fmt::format("k-fold needs k <= l, got k={} l={}", k, l));
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  FoldAssignment folds{k, std::vector<std::size_t>(l), seed};
  for (std::size_t pos = 0; pos < l; ++pos) folds.assignment[order[pos]] = pos % k;
  return folds;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) out.push_back(i);
  return out;
}

Standardizer Standardizer::fit(const Dataset& train) {
  Standardizer s;
  const std::size_t d = train.dim;
  const std::size_t l = train.size();
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 1.0);
  if (l == 0) return s;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t c = 0; c < d; ++c) s.mean_[c] += train.x[i * d + c];
  for (auto& m : s.mean_) m /= static_cast<double>(l);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = train.x[i * d + c] - s.mean_[c];
      var[c] += diff * diff;
    }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(l));
    s.scale_[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply_row(std::span<double> row) const {
  if (row.size() != mean_.size())
    throw Error(fmt::format("standardizer fitted on {} features, got {}", mean_.size(), row.size()));
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean_[c]) / scale_[c];
}

Dataset Standardizer::apply(const Dataset& ds) const {
  Dataset out = ds;
  for (std::size_t i = 0; i < out.size(); ++i)
    apply_row(std::span<double>(out.x).subspan(i * out.dim, out.dim));
  return out;
}

}  // namespace gwl
