#include "common.hpp"

#include <algorithm>
#include <cmath>

namespace plap::experiments {

TrainedModel train_on(const ExperimentConfig& cfg, const PointList& data, std::uint64_t seed) {
  TrainConfig tc = cfg.training.train;
  tc.seed = derive_seed(seed, stage::training);
  return {data, train(data, cfg.schedule, tc, cfg.training.arch)};
}

TrainedModel train_for_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng(derive_seed(seed, stage::data));
  return train_on(cfg, sample(cfg.gmm, cfg.training.n_train, rng), seed);
}

namespace detail {

std::string seed_dir_name(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

RunOutcome for_each_seed(const ExperimentConfig& cfg, const std::filesystem::path& out,
                         const std::string& command, const SeedBody& body) {
  RunOutcome outcome;
  const nlohmann::json resolved = to_json(cfg);
  nlohmann::json runs = nlohmann::json::array();
  for (std::uint64_t seed : cfg.seeds) {
    const Provenance prov{command, resolved, seed};
    try {
      nlohmann::json r = body(seed, out / seed_dir_name(seed), prov);
      r["seed"] = seed;
      runs.push_back(std::move(r));
    } catch (const std::exception& e) {
      outcome.failures.push_back({seed, e.what()});
    }
  }
  outcome.summary = {{"schema_version", kSchemaVersion},
                     {"command", command},
                     {"config", resolved},
                     {"seeds", cfg.seeds},
                     {"runs", runs},
                     {"completed", runs.size()},
                     {"failed", outcome.failures.size()}};
  write_json(out / "summary.json", outcome.summary);
  if (!outcome.failures.empty()) {
    nlohmann::json errs = nlohmann::json::array();
    for (const auto& f : outcome.failures) errs.push_back({{"seed", f.seed}, {"error", f.error}});
    write_json(out / "errors.json", {{"schema_version", kSchemaVersion},
                                     {"command", command},
                                     {"failed_seeds", errs}});
  }
  return outcome;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::string p_tag(double p) {
  std::string s = format_number(p);
  std::replace(s.begin(), s.end(), '.', '_');
  return "p" + s;
}

}  // namespace detail
}  // namespace plap::experiments
