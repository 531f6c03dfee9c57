#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "gwl/experiments.hpp"

namespace gwl {

namespace {

using Json = nlohmann::ordered_json;

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json seeds_json(const Seeds& s) {
  return Json{{"shuffle", s.shuffle}, {"fold", s.fold}, {"solver", s.solver}, {"weights", s.weights}};
}

Json dataset_json(const DatasetSummary& d) {
  return Json{{"name", d.name},
              {"samples", d.samples},
              {"dim", d.dim},
              {"removed_duplicates", d.removed_duplicates},
              {"removed_inconsistent", d.removed_inconsistent},
              {"positive_label", d.positive_label},
              {"negative_label", d.negative_label}};
}

std::vector<std::string> scheme_names(const std::vector<Scheme>& schemes) {
  std::vector<std::string> out;
  for (auto s : schemes) out.push_back(scheme_name(s));
  return out;
}

Json point_json(const PointResult& r, std::size_t rank, bool include_timing) {
  Json j{{"record", "point"},
         {"rank", rank},
         {"index", r.index},
         {"scheme", scheme_name(r.point.scheme)},
         {"C", r.point.C},
         {"gamma_k", r.point.gamma_k},
         {"gamma_s", optional_number(r.point.gamma_s)},
         {"valid", r.valid},
         {"mean_f1", r.mean_metric},
         {"fold_f1", r.fold_metric},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"solver_seed", r.solver_seed},
         {"weight_seed", r.weight_seed}};
  if (!r.valid) j["invalid_reason"] = r.invalid_reason;
  if (include_timing) j["seconds"] = r.seconds;
  return j;
}

Json best_summary(const PointResult* r) {
  if (!r) return Json(nullptr);
  return Json{{"index", r->index},
              {"scheme", scheme_name(r->point.scheme)},
              {"C", r->point.C},
              {"gamma_k", r->point.gamma_k},
              {"gamma_s", optional_number(r->point.gamma_s)},
              {"mean_f1", r->mean_metric}};
}

}  // namespace

void write_report(std::ostream& out, const ExperimentReport& report, bool include_timing) {
  const auto& c = report.config;
  Json meta{{"record", "meta"},
            {"format", "gwl-grid-report/1"},
            {"dataset", dataset_json(report.dataset)},
            {"metric", "f1"},
            {"positive_class", c.positive},
            {"folds", c.folds},
            {"iter_multiplier", c.iter_multiplier},
            {"max_iterations", c.max_iterations ? Json(*c.max_iterations) : Json(nullptr)},
            {"early_stop", c.early_stop},
            {"kkt_tolerance", c.kkt_tolerance},
            {"pair_selection", c.selection == PairSelection::random ? "random" : "max_violating"},
            {"standardize", c.standardize},
            {"normalize_weights", c.normalize_weights},
            {"seeds", seeds_json(c.seeds)},
            {"grid",
             Json{{"C", report.grid.C},
                  {"gamma_k", report.grid.gamma_k},
                  {"gamma_s", report.grid.gamma_s},
                  {"schemes", scheme_names(report.grid.schemes)}}},
            {"points", report.rows.size()}};
  out << meta.dump() << '\n';
  for (std::size_t k = 0; k < report.rows.size(); ++k)
    out << point_json(report.rows[k], k + 1, include_timing).dump() << '\n';
  Json best{{"record", "best"},
            {"overall", best_summary(report.best())},
            {"baseline", best_summary(report.best_for(Scheme::none))},
            {"density", best_summary(report.best_density())}};
  out << best.dump() << '\n';
}

std::string canonical_report(const ExperimentReport& report) {
  std::ostringstream out;
  write_report(out, report, false);
  return out.str();
}

std::uint64_t report_digest(const ExperimentReport& report) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_report(report)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void print_table(std::ostream& out, const ExperimentReport& report, std::size_t max_rows) {
  fmt::print(out, "{:>4}  {:>6}  {:>8}  {:>8}  {:>8}  {:>9}  {:>8}\n", "rank", "scheme", "C",
             "gamma_k", "gamma_s", "mean_f1", "seconds");
  const auto n = std::min(max_rows, report.rows.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = report.rows[k];
    const auto gs = r.point.gamma_s ? fmt::format("{:g}", *r.point.gamma_s) : std::string("-");
    const auto metric = r.valid ? fmt::format("{:.6f}", r.mean_metric) : std::string("invalid");
    fmt::print(out, "{:>4}  {:>6}  {:>8g}  {:>8g}  {:>8}  {:>9}  {:>8.2f}\n", k + 1,
               scheme_name(r.point.scheme), r.point.C, r.point.gamma_k, gs, metric, r.seconds);
  }
  if (n < report.rows.size()) fmt::print(out, "... {} more rows\n", report.rows.size() - n);
  auto line = [&](const char* label, const PointResult* r) {
    if (!r) return;
    fmt::print(out, "{:<22} mean F1 {:.6f}  (scheme {}, C {:g}, gamma_k {:g}{})\n", label,
               r->mean_metric, scheme_name(r->point.scheme), r->point.C, r->point.gamma_k,
               r->point.gamma_s ? fmt::format(", gamma_s {:g}", *r->point.gamma_s) : "");
  };
  line("best overall:", report.best());
  line("best w = 1:", report.best_for(Scheme::none));
  line("best density scheme:", report.best_density());
}

void write_mlp_report(std::ostream& out, const MlpReport& report, bool include_timing) {
  const auto& c = report.config;
  Json meta{{"record", "meta"},
            {"format", "gwl-mlp-report/1"},
            {"dataset", dataset_json(report.dataset)},
            {"metric", "mae"},
            {"hidden", c.hidden},
            {"activation", activation_name(c.activation)},
            {"epochs", c.train.epochs},
            {"batch_size", c.train.batch_size},
            {"learning_rate", c.train.learning_rate},
            {"train_loss", loss_name(c.train.base)},
            {"gamma_s", c.gamma_s},
            {"repeats", c.repeats},
            {"test_fraction", c.test_fraction},
            {"standardize", c.standardize},
            {"normalize_weights", c.normalize_weights},
            {"seeds", seeds_json(c.seeds)}};
  out << meta.dump() << '\n';
  for (const auto& r : report.rows) {
    Json j{{"record", "run"},
           {"repeat", r.repeat},
           {"split_seed", r.split_seed},
           {"init_seed", r.init_seed},
           {"batch_seed", r.batch_seed},
           {"train_size", r.train_size},
           {"test_size", r.test_size},
           {"standard_mae", r.standard_mae},
           {"best_gamma_s", r.best_gamma_s},
           {"best_weighted_mae", r.best_weighted_mae},
           {"weighted_mae", r.weighted_mae}};
    if (include_timing) j["seconds"] = r.seconds;
    out << j.dump() << '\n';
  }
}

void print_mlp_table(std::ostream& out, const MlpReport& report) {
  fmt::print(out, "{:>6}  {:>18}  {:>10}  {:>18}\n", "repeat", "standard MLP MAE", "gamma best",
             "best loss MLP MAE");
  for (const auto& r : report.rows)
    fmt::print(out, "{:>6}  {:>18.7f}  {:>10g}  {:>18.7f}{}\n", r.repeat, r.standard_mae,
               r.best_gamma_s, r.best_weighted_mae,
               r.best_weighted_mae < r.standard_mae ? "  *" : "");
}

}  // namespace gwl
