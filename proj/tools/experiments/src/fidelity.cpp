#include "common.hpp"
#include "plap/experiments/svg.hpp"

#include <algorithm>
#include <cmath>

namespace plap::experiments {

using detail::number;

Point refine_mode(const GmmParams& g, Point x, int iterations) {
  const std::size_t k = g.means.size();
  std::vector<double> logw(k);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t c = 0; c < k; ++c)
      logw[c] = std::log(g.weights[c]) - (x - g.means[c]).squaredNorm() / (2.0 * g.sigma2);
    const double top = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    Point next = Point::Zero(x.size());
    for (std::size_t c = 0; c < k; ++c) {
      const double w = std::exp(logw[c] - top);
      total += w;
      next += w * g.means[c];
    }
    next /= total;
    const double step = (next - x).norm();
    x = std::move(next);
    if (step < 1e-14) break;
  }
  return x;
}

std::vector<Anchor> fidelity_anchors(const GmmParams& g, const FidelityOptions& opts) {
  Point centroid = Point::Zero(g.dim());
  for (const auto& m : g.means) centroid += m;
  centroid /= static_cast<double>(g.means.size());
  std::vector<Anchor> anchors, others;
  for (const auto& m : g.means) {
    Point mode = refine_mode(g, m);
    if (opts.non_maxima == "slopes") {
      Point away = m - centroid;
      if (away.norm() < 1e-12) away = Point::Unit(g.dim(), 0);
      away.normalize();
      others.push_back({"slope", mode + opts.offset_sigmas * std::sqrt(g.sigma2) * away});
    }
    anchors.push_back({"maximum", std::move(mode)});
  }
  if (opts.non_maxima == "midpoints") {
    for (std::size_t i = 0; i < g.means.size(); ++i)
      for (std::size_t j = i + 1; j < g.means.size(); ++j)
        others.push_back({"midpoint", 0.5 * (g.means[i] + g.means[j])});
  }
  anchors.insert(anchors.end(), others.begin(), others.end());
  return anchors;
}

FidelitySeedResult fidelity_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  FidelitySeedResult res;
  res.seed = seed;
  res.anchors = fidelity_anchors(cfg.gmm, cfg.fidelity);

  const auto trained = train_for_seed(cfg, seed);
  res.epoch_loss = trained.result.epoch_loss;
  const ScoreField oracle = oracle_field(cfg.gmm);
  const ScoreField learned = learned_field(trained.result.model, cfg.schedule, 0);

  const std::uint64_t est_seed = derive_seed(seed, stage::estimation);
  std::uint64_t stream = 0;
  for (const auto* field : {&oracle, &learned}) {
    for (std::size_t a = 0; a < res.anchors.size(); ++a) {
      for (double p : cfg.p_values) {
        for (auto form : {Formulation::boundary, Formulation::volume}) {
          EstimatorConfig ec = cfg.estimator;
          ec.p = p;
          ec.formulation = form;
          for (int rep = 0; rep < cfg.fidelity.repetitions; ++rep) {
            Rng rng = Rng::substream(est_seed, stream++);
            res.rows.push_back({field->name(), a, p, form, rep, estimate(*field, res.anchors[a].x, ec, rng)});
          }
        }
      }
    }
  }

  // Dense Monte Carlo of the analytic pointwise operator; one point set per anchor.
  const std::uint64_t exact_seed = derive_seed(seed, stage::exact);
  for (std::size_t a = 0; a < res.anchors.size(); ++a) {
    Rng rng = Rng::substream(exact_seed, a);
    const auto pts = sample_ball_uniform(BallSpec(res.anchors[a].x, cfg.estimator.radius),
                                         cfg.fidelity.dense_samples, rng);
    for (double p : cfg.p_values) {
      double sum = 0.0, sq = 0.0;
      std::size_t used = 0;
      for (const auto& x : pts) {
        if (auto v = pointwise_p_laplace_exact(cfg.gmm, x, p)) {
          sum += *v;
          sq += *v * *v;
          ++used;
        }
      }
      if (used < 2) throw EstimationError("dense average has fewer than two regular points");
      const double n = static_cast<double>(used);
      const double mean = sum / n;
      const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
      res.exact.push_back({a, p, mean, std::sqrt(var / n)});
    }
  }

  const Grid2D grid = Grid2D::covering(cfg.gmm, cfg.fidelity.cosine_grid);
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      const Point x = grid.node(i, j);
      const Point s = oracle(x), sh = learned(x);
      if (s.norm() < kGradientFloor || sh.norm() < kGradientFloor) continue;
      res.cosines.push_back(s.dot(sh) / (s.norm() * sh.norm()));
      res.magnitude_ratios.push_back(sh.norm() / s.norm());
    }
  }
  res.median_cosine = detail::median(res.cosines);
  return res;
}

namespace {

const ExactAverage& find_exact(const FidelitySeedResult& r, std::size_t anchor, double p) {
  for (const auto& e : r.exact)
    if (e.anchor == anchor && e.p == p) return e;
  throw std::logic_error("missing exact average");
}

nlohmann::json write_fidelity(const ExperimentConfig& cfg, const FidelitySeedResult& r,
                              const std::filesystem::path& dir, const Provenance& prov) {
  CsvTable runs({"field", "anchor", "kind", "x", "y", "p", "formulation", "rep", "value",
                 "std_error", "n_used", "singular_hits"});
  for (const auto& row : r.rows) {
    const auto& a = r.anchors[row.anchor];
    runs.add_row({row.field, static_cast<std::int64_t>(row.anchor), a.kind, a.x[0], a.x[1], row.p,
                  std::string(to_string(row.formulation)), static_cast<std::int64_t>(row.rep),
                  row.estimate.value, row.estimate.std_error,
                  static_cast<std::int64_t>(row.estimate.n_used),
                  static_cast<std::int64_t>(row.estimate.singular_hits)});
  }
  runs.write(dir / "runs.csv", prov);

  CsvTable exact({"anchor", "kind", "p", "mean", "std_error", "n"});
  for (const auto& e : r.exact)
    exact.add_row({static_cast<std::int64_t>(e.anchor), r.anchors[e.anchor].kind, e.p, e.mean,
                   e.std_error, static_cast<std::int64_t>(cfg.fidelity.dense_samples)});
  exact.write(dir / "exact.csv", prov);

  // Violin-style summaries, one row per (field, anchor, p, formulation).
  CsvTable summary({"field", "anchor", "kind", "p", "formulation", "n", "mean", "sd", "se", "min",
                    "q25", "median", "q75", "max", "exact_mean", "exact_se", "error", "z",
                    "within_3se"});
  int oracle_cells = 0, oracle_within = 0;
  double oracle_max_abs_z = 0.0;
  nlohmann::json variance = nlohmann::json::array();
  bool variance_ok = true;
  const std::size_t reps = static_cast<std::size_t>(cfg.fidelity.repetitions);
  for (std::size_t start = 0; start < r.rows.size(); start += reps) {
    const auto& head = r.rows[start];
    std::vector<double> vals;
    for (std::size_t k = start; k < start + reps; ++k) vals.push_back(r.rows[k].estimate.value);
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    const double sd = std::sqrt(detail::sample_variance(vals));
    const double se = sd / std::sqrt(static_cast<double>(vals.size()));
    const auto& ex = find_exact(r, head.anchor, head.p);
    const double err = mean - ex.mean;
    const double comb = std::hypot(se, ex.std_error);
    const double z = comb > 0 ? err / comb : (err == 0 ? 0.0 : std::copysign(INFINITY, err));
    const bool within = std::abs(z) <= 3.0;
    if (head.field == "oracle") {
      ++oracle_cells;
      oracle_within += within;
      oracle_max_abs_z = std::max(oracle_max_abs_z, std::abs(z));
    }
    summary.add_row({head.field, static_cast<std::int64_t>(head.anchor), r.anchors[head.anchor].kind,
                     head.p, std::string(to_string(head.formulation)),
                     static_cast<std::int64_t>(vals.size()), mean, sd, se,
                     detail::quantile(vals, 0.0), detail::quantile(vals, 0.25), detail::median(vals),
                     detail::quantile(vals, 0.75), detail::quantile(vals, 1.0), ex.mean, ex.std_error,
                     err, z, std::string(within ? "true" : "false")});
  }
  summary.write(dir / "summary.csv", prov);

  // Boundary vs volume spread at p = 1 on the oracle field.
  for (std::size_t a = 0; a < r.anchors.size(); ++a) {
    std::vector<double> bnd, vol;
    for (const auto& row : r.rows) {
      if (row.field != "oracle" || row.anchor != a || row.p != 1.0) continue;
      (row.formulation == Formulation::boundary ? bnd : vol).push_back(row.estimate.value);
    }
    if (bnd.empty()) continue;
    const double vb = detail::sample_variance(bnd), vv = detail::sample_variance(vol);
    variance_ok = variance_ok && vb <= vv;
    variance.push_back({{"anchor", a}, {"boundary_variance", vb}, {"volume_variance", vv}});
  }

  CsvTable errors({"cosine", "magnitude_ratio"});
  for (std::size_t k = 0; k < r.cosines.size(); ++k) errors.add_row({r.cosines[k], r.magnitude_ratios[k]});
  errors.write(dir / "score_errors.csv", prov);

  CsvTable loss({"epoch", "loss"});
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e)
    loss.add_row({static_cast<std::int64_t>(e), r.epoch_loss[e]});
  loss.write(dir / "loss.csv", prov);

  const std::string desc = prov.config.dump() + " seed=" + std::to_string(prov.seed);
  write_text(dir / "cosine_hist.svg",
             svg::histogram({"Direction agreement of learned score", "cos(s_hat, s)", "count", desc},
                            r.cosines));
  std::vector<double> log_ratio;
  for (double m : r.magnitude_ratios) log_ratio.push_back(std::log10(m));
  write_text(dir / "magnitude_hist.svg",
             svg::histogram({"Magnitude of learned score", "log10 |s_hat| / |s|", "count", desc},
                            log_ratio));
  for (double p : cfg.p_values) {
    std::vector<svg::Series> series = {{{}, {}, "#1f77b4", "boundary"},
                                       {{}, {}, "#ff7f0e", "volume"},
                                       {{}, {}, "#d62728", "dense exact", 5.0}};
    for (const auto& row : r.rows) {
      if (row.field != "oracle" || row.p != p) continue;
      auto& s = series[row.formulation == Formulation::boundary ? 0 : 1];
      const double jitter = (row.rep % 20) / 100.0 - 0.1;
      s.x.push_back(static_cast<double>(row.anchor) + (row.formulation == Formulation::boundary ? -0.2 : 0.2) + jitter);
      s.y.push_back(row.estimate.value);
    }
    for (const auto& e : r.exact) {
      if (e.p != p) continue;
      series[2].x.push_back(static_cast<double>(e.anchor));
      series[2].y.push_back(e.mean);
    }
    write_text(dir / ("estimates_" + detail::p_tag(p) + ".svg"),
               svg::plot({"Oracle estimates per anchor, p = " + format_number(p), "anchor", "estimate", desc},
                         series));
  }

  return {{"median_cosine", r.median_cosine},
          {"oracle_cells", oracle_cells},
          {"oracle_within_3se", oracle_within},
          {"oracle_max_abs_z", number(oracle_max_abs_z)},
          {"p1_boundary_variance_le_volume", variance_ok},
          {"p1_variance", variance},
          {"final_loss", r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back()}};
}

}  // namespace

RunOutcome run_fidelity(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  return detail::for_each_seed(cfg, out, "fidelity",
                               [&cfg](std::uint64_t seed, const std::filesystem::path& dir,
                                      const Provenance& prov) {
                                 return write_fidelity(cfg, fidelity_seed(cfg, seed), dir, prov);
                               });
}

}  // namespace plap::experiments
