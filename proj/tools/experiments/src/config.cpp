#include "plap/experiments/config.hpp"

#include <fstream>
#include <set>

namespace plap::experiments {

using nlohmann::json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fidelity: return "fidelity";
    case ExperimentKind::memorization: return "memorization";
    case ExperimentKind::bounds: return "bounds";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
  if (s == "fidelity") return ExperimentKind::fidelity;
  if (s == "memorization") return ExperimentKind::memorization;
  if (s == "bounds") return ExperimentKind::bounds;
  throw ConfigError("experiment: unknown kind '" + s + "'");
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be > 0");
}

json default_gmm_spec() {
  return {{"components", 3}, {"dim", 2}, {"sigma2", 1.0}, {"mean_range", {-5.0, 5.0}}, {"seed", 7}};
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.gmm_spec = default_gmm_spec();
  c.gmm = gmm_from_json(c.gmm_spec);
  c.schedule_spec = {{"steps", NoiseSchedule::kDefaultSteps},
                     {"beta_start", NoiseSchedule::kDefaultBetaStart},
                     {"beta_end", NoiseSchedule::kDefaultBetaEnd}};
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"experiment", "gmm", "schedule", "training", "estimator", "seeds", "output_dir",
              "fidelity", "memorization", "bounds", "sample"});
  ExperimentConfig c = default_config();

  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) throw ConfigError("experiment: expected a string");
    c.experiment = experiment_from_string(j["experiment"].get<std::string>());
  }
  if (j.contains("gmm")) {
    c.gmm_spec = j["gmm"];
    try {
      c.gmm = gmm_from_json(c.gmm_spec);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("gmm: ") + e.what());
    }
  }
  if (j.contains("schedule")) {
    c.schedule_spec = j["schedule"];
    try {
      c.schedule = schedule_from_json(c.schedule_spec);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("schedule: ") + e.what());
    }
  }
  if (j.contains("training")) {
    const auto& t = j["training"];
    check_keys(t, "training",
               {"epochs", "learning_rate", "batch_size", "n_train", "hidden_width", "embed_dim",
                "embed_base"});
    auto& o = c.training;
    read(t, "epochs", o.train.epochs, "training");
    read(t, "learning_rate", o.train.learning_rate, "training");
    read(t, "batch_size", o.train.batch_size, "training");
    read(t, "n_train", o.n_train, "training");
    read(t, "hidden_width", o.arch.hidden_width, "training");
    read(t, "embed_dim", o.arch.embed_dim, "training");
    read(t, "embed_base", o.arch.embed_base, "training");
    if (o.train.epochs < 1 || o.train.batch_size < 1 || o.n_train < 1 || o.arch.hidden_width < 1)
      throw ConfigError("training: epochs, batch_size, n_train and hidden_width must be >= 1");
    if (o.arch.embed_dim < 2 || o.arch.embed_dim % 2 != 0)
      throw ConfigError("training.embed_dim must be even and >= 2");
    positive(o.train.learning_rate, "training.learning_rate");
  }
  c.training.arch.input_dim = c.gmm.dim();

  if (j.contains("estimator")) {
    const auto& e = j["estimator"];
    check_keys(e, "estimator",
               {"p_values", "radius", "n_samples", "fd_step", "formulation",
                "normalize_by_volume"});
    read(e, "p_values", c.p_values, "estimator");
    read(e, "radius", c.estimator.radius, "estimator");
    read(e, "n_samples", c.estimator.n_samples, "estimator");
    read(e, "fd_step", c.estimator.fd_step, "estimator");
    read(e, "normalize_by_volume", c.estimator.normalize_by_volume, "estimator");
    if (e.contains("formulation")) {
      try {
        c.estimator.formulation = formulation_from_string(e["formulation"].get<std::string>());
      } catch (const std::exception& ex) {
        throw ConfigError(std::string("estimator.formulation: ") + ex.what());
      }
    }
  }
  if (c.p_values.empty()) throw ConfigError("estimator.p_values must be nonempty");
  for (double p : c.p_values) {
    EstimatorConfig probe = c.estimator;
    probe.p = p;
    try {
      probe.validate();
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("estimator: ") + ex.what());
    }
  }

  if (j.contains("seeds")) {
    read(j, "seeds", c.seeds, "config");
    if (c.seeds.empty()) throw ConfigError("seeds must be nonempty");
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("output_dir: expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }

  if (j.contains("fidelity")) {
    const auto& f = j["fidelity"];
    check_keys(f, "fidelity",
               {"repetitions", "dense_samples", "cosine_grid", "non_maxima", "offset_sigmas"});
    read(f, "repetitions", c.fidelity.repetitions, "fidelity");
    read(f, "dense_samples", c.fidelity.dense_samples, "fidelity");
    read(f, "cosine_grid", c.fidelity.cosine_grid, "fidelity");
    read(f, "non_maxima", c.fidelity.non_maxima, "fidelity");
    read(f, "offset_sigmas", c.fidelity.offset_sigmas, "fidelity");
    if (c.fidelity.non_maxima != "midpoints" && c.fidelity.non_maxima != "slopes")
      throw ConfigError("fidelity.non_maxima must be 'midpoints' or 'slopes'");
    if (c.fidelity.repetitions < 2 || c.fidelity.dense_samples < 2 || c.fidelity.cosine_grid < 1)
      throw ConfigError("fidelity: repetitions and dense_samples need >= 2, cosine_grid >= 1");
  }
  if (j.contains("memorization")) {
    const auto& m = j["memorization"];
    check_keys(m, "memorization",
               {"n_base", "n_replicas", "grid_size", "inflate_sigmas", "memorized_repeats",
                "n_background"});
    auto& o = c.memorization;
    read(m, "n_base", o.n_base, "memorization");
    read(m, "n_replicas", o.n_replicas, "memorization");
    read(m, "grid_size", o.grid_size, "memorization");
    read(m, "inflate_sigmas", o.inflate_sigmas, "memorization");
    read(m, "memorized_repeats", o.memorized_repeats, "memorization");
    read(m, "n_background", o.n_background, "memorization");
    if (o.n_base < 1 || o.n_replicas < 0 || o.grid_size < 1 || o.memorized_repeats < 1 ||
        o.n_background < 1)
      throw ConfigError("memorization: sizes out of range");
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    check_keys(b, "bounds", {"n_anchors", "n_segment", "self_test", "surface_resolution"});
    read(b, "n_anchors", c.bounds.n_anchors, "bounds");
    read(b, "n_segment", c.bounds.n_segment, "bounds");
    read(b, "self_test", c.bounds.self_test, "bounds");
    read(b, "surface_resolution", c.bounds.surface_resolution, "bounds");
    if (c.bounds.n_anchors < 1 || c.bounds.n_segment < 2 || c.bounds.surface_resolution < 2)
      throw ConfigError("bounds: n_anchors >= 1, n_segment >= 2, surface_resolution >= 2");
  }
  if (j.contains("sample")) {
    const auto& s = j["sample"];
    check_keys(s, "sample", {"n_samples", "checkpoint"});
    read(s, "n_samples", c.sample.n_samples, "sample");
    read(s, "checkpoint", c.sample.checkpoint, "sample");
    if (c.sample.n_samples < 1) throw ConfigError("sample.n_samples must be >= 1");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  if (c.experiment) j["experiment"] = to_string(*c.experiment);
  j["gmm"] = c.gmm_spec;
  j["schedule"] = c.schedule_spec;
  const auto& t = c.training;
  j["training"] = {{"epochs", t.train.epochs},       {"learning_rate", t.train.learning_rate},
                   {"batch_size", t.train.batch_size}, {"n_train", t.n_train},
                   {"hidden_width", t.arch.hidden_width}, {"embed_dim", t.arch.embed_dim},
                   {"embed_base", t.arch.embed_base}};
  j["estimator"] = {{"p_values", c.p_values},
                    {"radius", c.estimator.radius},
                    {"n_samples", c.estimator.n_samples},
                    {"fd_step", c.estimator.fd_step},
                    {"formulation", plap::to_string(c.estimator.formulation)},
                    {"normalize_by_volume", c.estimator.normalize_by_volume}};
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir.string();
  j["fidelity"] = {{"repetitions", c.fidelity.repetitions},
                   {"dense_samples", c.fidelity.dense_samples},
                   {"cosine_grid", c.fidelity.cosine_grid},
                   {"non_maxima", c.fidelity.non_maxima},
                   {"offset_sigmas", c.fidelity.offset_sigmas}};
  const auto& m = c.memorization;
  j["memorization"] = {{"n_base", m.n_base},
                       {"n_replicas", m.n_replicas},
                       {"grid_size", m.grid_size},
                       {"inflate_sigmas", m.inflate_sigmas},
                       {"memorized_repeats", m.memorized_repeats},
                       {"n_background", m.n_background}};
  j["bounds"] = {{"n_anchors", c.bounds.n_anchors},
                 {"n_segment", c.bounds.n_segment},
                 {"self_test", c.bounds.self_test},
                 {"surface_resolution", c.bounds.surface_resolution}};
  j["sample"] = {{"n_samples", c.sample.n_samples}, {"checkpoint", c.sample.checkpoint}};
  return j;
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stage) {
  return Rng::substream(run_seed, stage).engine()();
}

}  // namespace plap::experiments
