#pragma once

#include "plap/experiments/artifacts.hpp"
#include "plap/experiments/runs.hpp"

#include <functional>

namespace plap::experiments::detail {

using SeedBody = std::function<nlohmann::json(std::uint64_t seed, const std::filesystem::path& dir,
                                              const Provenance& prov)>;

/// Runs `body` once per configured seed, isolating failures, then writes
/// summary.json (and errors.json when something failed) into `out`.
RunOutcome for_each_seed(const ExperimentConfig& cfg, const std::filesystem::path& out,
                         const std::string& command, const SeedBody& body);

std::string seed_dir_name(std::uint64_t seed);
double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);
double sample_variance(const std::vector<double>& v);
/// Non-finite doubles become strings so they survive JSON.
nlohmann::json number(double v);
std::string p_tag(double p);

}  // namespace plap::experiments::detail
