#include "common.hpp"
#include "plap/experiments/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plap::experiments {

BoundsSeedResult bounds_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.estimator.formulation != Formulation::boundary)
    throw ConfigError("bounds: the bound is stated for the boundary formulation only");
  BoundsSeedResult res;
  res.seed = seed;
  const auto trained = train_for_seed(cfg, seed);
  res.epoch_loss = trained.result.epoch_loss;
  Rng rng(derive_seed(seed, stage::anchors));
  res.anchors = reverse_sample(trained.result.model, cfg.schedule, cfg.bounds.n_anchors, rng);

  const ScoreField s = oracle_field(cfg.gmm);
  const ScoreField s_hat = cfg.bounds.self_test ? s : learned_field(trained.result.model, cfg.schedule, 0);
  const std::uint64_t est_seed = derive_seed(seed, stage::estimation);
  for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi) {
    EstimatorConfig ec = cfg.estimator;
    ec.p = cfg.p_values[pi];
    res.reports.push_back(
        validate_bound(s, s_hat, res.anchors, ec, derive_seed(est_seed, pi), cfg.bounds.n_segment));
  }
  return res;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

nlohmann::json write_bounds(const ExperimentConfig& cfg, const BoundsSeedResult& r,
                            const std::filesystem::path& dir, const Provenance& prov) {
  const std::string desc = prov.config.dump() + " seed=" + std::to_string(prov.seed);
  CsvTable table({"p", "anchor", "x", "y", "delta", "m", "M", "c_p", "empirical_error", "ratio",
                  "assumptions_ok", "segment_min", "estimate_s", "estimate_s_hat"});
  nlohmann::json per_p = nlohmann::json::array();
  bool all_dominated = true;
  for (std::size_t pi = 0; pi < r.reports.size(); ++pi) {
    const double p = cfg.p_values[pi];
    int ok = 0, violations = 0;
    double max_ratio = 0.0;
    double delta_hi = 0.0, m_lo = std::numeric_limits<double>::infinity(), m_hi = 0.0, big_m = 0.0;
    svg::Series points{{}, {}, "#d62728", "anchors"};
    svg::Series dominance{{}, {}, "#1f77b4", "anchors with assumptions"};
    for (std::size_t a = 0; a < r.reports[pi].size(); ++a) {
      const auto& b = r.reports[pi][a];
      const double ratio = b.c_p > 0 ? b.empirical_error / b.c_p : (b.empirical_error > 0 ? INFINITY : 0.0);
      table.add_row({p, static_cast<std::int64_t>(a), b.anchor[0], b.anchor[1], b.delta, b.m, b.big_m,
                     b.c_p, b.empirical_error, ratio, std::string(b.assumptions_ok ? "true" : "false"),
                     b.segment_min, b.estimate_s, b.estimate_s_hat});
      if (!b.assumptions_ok) continue;
      ++ok;
      max_ratio = std::max(max_ratio, ratio);
      if (b.empirical_error > b.c_p) ++violations;
      delta_hi = std::max(delta_hi, b.delta);
      m_lo = std::min(m_lo, b.m);
      m_hi = std::max(m_hi, b.m);
      big_m = std::max(big_m, b.big_m);
      points.x.push_back(b.delta);
      points.y.push_back(b.m);
      if (b.c_p > 0 && b.empirical_error > 0) {
        dominance.x.push_back(std::log10(b.c_p));
        dominance.y.push_back(std::log10(b.empirical_error));
      }
    }
    all_dominated = all_dominated && violations == 0;
    const auto n = static_cast<double>(r.reports[pi].size());
    per_p.push_back({{"p", p},
                     {"n_anchors", r.reports[pi].size()},
                     {"assumption_ok_count", ok},
                     {"assumption_ok_fraction", n > 0 ? ok / n : 0.0},
                     {"violations", violations},
                     {"max_ratio", detail::number(max_ratio)}});

    if (ok > 0 && delta_hi > 0) {
      const int res_n = cfg.bounds.surface_resolution;
      const auto deltas = linspace(0.0, 1.1 * delta_hi, res_n);
      const auto ms = linspace(m_lo, std::max(m_hi, m_lo * 1.0001), res_n);
      const Eigen::MatrixXd surf = bound_surface(p, deltas, ms, big_m, 2, cfg.estimator.radius);
      CsvTable grid({"delta", "m", "c_p"});
      for (int i = 0; i < res_n; ++i)
        for (int j = 0; j < res_n; ++j) grid.add_row({deltas[i], ms[j], surf(i, j)});
      grid.write(dir / ("surface_" + detail::p_tag(p) + ".csv"), prov);
      // Heatmap rows follow the y axis, so put m on y and delta on x.
      std::vector<std::pair<double, double>> marks;
      for (std::size_t k = 0; k < points.x.size(); ++k) marks.emplace_back(points.x[k], points.y[k]);
      write_text(dir / ("surface_" + detail::p_tag(p) + ".svg"),
                 svg::heatmap({"Bound constant over (delta, m), p = " + format_number(p), "delta", "m", desc},
                              surf.transpose(), deltas.front(), deltas.back(), ms.front(), ms.back(), marks));
    }
    write_text(dir / ("dominance_" + detail::p_tag(p) + ".svg"),
               svg::plot({"Empirical error vs bound, p = " + format_number(p), "log10 c_p",
                          "log10 empirical error", desc},
                         {dominance}, true));
  }
  table.write(dir / "reports.csv", prov);

  CsvTable anchors({"x", "y"});
  for (const auto& a : r.anchors) anchors.add_row({a[0], a[1]});
  anchors.write(dir / "anchors.csv", prov);

  return {{"per_p", per_p}, {"all_dominated", all_dominated}, {"self_test", cfg.bounds.self_test}};
}

}  // namespace

RunOutcome run_bounds(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  return detail::for_each_seed(cfg, out, "bounds",
                               [&cfg](std::uint64_t seed, const std::filesystem::path& dir,
                                      const Provenance& prov) {
                                 return write_bounds(cfg, bounds_seed(cfg, seed), dir, prov);
                               });
}

}  // namespace plap::experiments
