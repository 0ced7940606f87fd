#include "common.hpp"
#include "plap/experiments/svg.hpp"

#include <algorithm>
#include <cmath>

namespace plap::experiments {

namespace {

double extremum_offset(const Grid2D& grid, const Eigen::MatrixXd& values, const Point& target,
                       bool maximum) {
  Eigen::Index bi = 0, bj = 0;
  if (maximum) values.maxCoeff(&bi, &bj);
  else values.minCoeff(&bi, &bj);
  const double dx = grid.cols() > 1 ? grid.xs[1] - grid.xs[0] : 1.0;
  const double dy = grid.rows() > 1 ? grid.ys[1] - grid.ys[0] : 1.0;
  const Point node = grid.node(static_cast<int>(bi), static_cast<int>(bj));
  return std::max(std::abs(node[0] - target[0]) / dx, std::abs(node[1] - target[1]) / dy);
}

}  // namespace

MemorizationSeedResult memorization_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& mo = cfg.memorization;
  MemorizationSeedResult res;
  res.seed = seed;
  res.scenario = build_scenario(cfg.gmm, mo.n_base, mo.n_replicas, derive_seed(seed, stage::data));
  const auto trained = train_on(cfg, res.scenario.training_set(), seed);
  res.epoch_loss = trained.result.epoch_loss;
  const ScoreField field = learned_field(trained.result.model, cfg.schedule, 0);
  res.grid = Grid2D::covering(cfg.gmm, mo.grid_size, mo.inflate_sigmas);

  Rng bg_rng(derive_seed(seed, stage::background));
  const PointList background = sample(cfg.gmm, mo.n_background, bg_rng);
  const Point& target = res.scenario.memorized_point;

  const std::uint64_t est_seed = derive_seed(seed, stage::estimation);
  for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi) {
    EstimatorConfig ec = cfg.estimator;
    ec.p = cfg.p_values[pi];
    // Streams: grid nodes, memorized repeats and background each get their own base seed.
    const std::uint64_t base = derive_seed(est_seed, pi);
    CriterionReport rep;
    rep.p = ec.p;
    rep.grid = grid_p_laplace(field, res.grid, ec, derive_seed(base, 0));
    auto& d = rep.detection;
    d.criterion_name = "p_laplace";
    const std::uint64_t mem_seed = derive_seed(base, 1), bg_seed = derive_seed(base, 2);
    for (int r = 0; r < mo.memorized_repeats; ++r) {
      Rng rng = Rng::substream(mem_seed, static_cast<std::uint64_t>(r));
      d.values_memorized.push_back(estimate(field, target, ec, rng).value);
    }
    for (std::size_t b = 0; b < background.size(); ++b) {
      Rng rng = Rng::substream(bg_seed, b);
      d.values_background.push_back(estimate(field, background[b], ec, rng).value);
    }
    // A single estimate is ranked, matching the single estimate at each grid node.
    d.percentile = percentile_rank(rep.grid, d.values_memorized.front());
    d.auc = auc(d.values_memorized, d.values_background, Orientation::lower_is_positive);
    rep.grid_min = rep.grid.minCoeff();
    rep.extremum_offset_cells = extremum_offset(res.grid, rep.grid, target, false);
    res.criteria.push_back(std::move(rep));
  }

  CriterionReport norm;
  norm.grid.resize(res.grid.rows(), res.grid.cols());
  for (int i = 0; i < res.grid.rows(); ++i)
    for (int j = 0; j < res.grid.cols(); ++j)
      norm.grid(i, j) = score_norm_criterion(field, res.grid.node(i, j));
  auto& d = norm.detection;
  d.criterion_name = "score_norm";
  d.values_memorized = {score_norm_criterion(field, target)};
  for (const auto& b : background) d.values_background.push_back(score_norm_criterion(field, b));
  // Larger norm flags memorization, so rank from the top.
  d.percentile = 100.0 - percentile_rank(norm.grid, d.values_memorized.front());
  d.auc = auc(d.values_memorized, d.values_background, Orientation::higher_is_positive);
  norm.grid_min = norm.grid.minCoeff();
  norm.extremum_offset_cells = extremum_offset(res.grid, norm.grid, target, true);
  res.criteria.push_back(std::move(norm));
  return res;
}

namespace {

nlohmann::json write_memorization(const MemorizationSeedResult& r,
                                  const std::filesystem::path& dir, const Provenance& prov) {
  const std::string desc = prov.config.dump() + " seed=" + std::to_string(prov.seed);
  const Point& target = r.scenario.memorized_point;
  CsvTable table({"criterion", "p", "percentile", "auc", "memorized_value", "memorized_mean",
                  "background_median", "grid_min", "extremum_offset_cells"});
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : r.criteria) {
    const auto& d = c.detection;
    double mem_mean = 0.0;
    for (double v : d.values_memorized) mem_mean += v;
    mem_mean /= static_cast<double>(d.values_memorized.size());
    table.add_row({d.criterion_name, c.p, d.percentile, d.auc, d.values_memorized.front(), mem_mean,
                   detail::median(d.values_background), c.grid_min, c.extremum_offset_cells});
    rows.push_back({{"criterion", d.criterion_name},
                    {"p", c.p},
                    {"percentile", d.percentile},
                    {"auc", d.auc},
                    {"extremum_offset_cells", c.extremum_offset_cells}});

    const std::string tag = d.criterion_name == "score_norm" ? "score_norm" : detail::p_tag(c.p);
    CsvTable grid({"row", "col", "x", "y", "value"});
    for (int i = 0; i < r.grid.rows(); ++i)
      for (int j = 0; j < r.grid.cols(); ++j)
        grid.add_row({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), r.grid.xs[j],
                      r.grid.ys[i], c.grid(i, j)});
    grid.write(dir / ("grid_" + tag + ".csv"), prov);
    const std::string title = d.criterion_name == "score_norm"
                                  ? "Learned score norm"
                                  : "Learned p-Laplace, p = " + format_number(c.p);
    write_text(dir / ("grid_" + tag + ".svg"),
               svg::heatmap({title + " (percentile " + format_number(std::round(d.percentile * 10) / 10) + ")",
                             "x", "y", desc},
                            c.grid, r.grid.xs.front(), r.grid.xs.back(), r.grid.ys.front(),
                            r.grid.ys.back(), {{target[0], target[1]}}));
  }
  table.write(dir / "percentiles.csv", prov);

  CsvTable values({"criterion", "p", "group", "index", "value"});
  for (const auto& c : r.criteria) {
    const auto& d = c.detection;
    for (std::size_t k = 0; k < d.values_memorized.size(); ++k)
      values.add_row({d.criterion_name, c.p, std::string("memorized"), static_cast<std::int64_t>(k),
                      d.values_memorized[k]});
    for (std::size_t k = 0; k < d.values_background.size(); ++k)
      values.add_row({d.criterion_name, c.p, std::string("background"), static_cast<std::int64_t>(k),
                      d.values_background[k]});
  }
  values.write(dir / "detection_values.csv", prov);

  CsvTable loss({"epoch", "loss"});
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e)
    loss.add_row({static_cast<std::int64_t>(e), r.epoch_loss[e]});
  loss.write(dir / "loss.csv", prov);

  nlohmann::json scenario = {
      {"memorized_point", std::vector<double>(target.data(), target.data() + target.size())},
      {"memorized_index", r.scenario.memorized_index},
      {"n_base", r.scenario.base_samples.size()},
      {"n_replicas", r.scenario.n_replicas}};
  write_json(dir / "scenario.json", with_provenance({{"scenario", scenario}}, prov));
  return {{"scenario", scenario}, {"criteria", rows}};
}

}  // namespace

RunOutcome run_memorization(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  return detail::for_each_seed(cfg, out, "memorize",
                               [&cfg](std::uint64_t seed, const std::filesystem::path& dir,
                                      const Provenance& prov) {
                                 return write_memorization(memorization_seed(cfg, seed), dir, prov);
                               });
}

}  // namespace plap::experiments
