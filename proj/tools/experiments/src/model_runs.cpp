#include "common.hpp"
#include "plap/experiments/svg.hpp"

namespace plap::experiments {

namespace {

void write_loss(const std::vector<double>& epoch_loss, const std::filesystem::path& dir,
                const Provenance& prov) {
  CsvTable loss({"epoch", "loss"});
  svg::Series curve{{}, {}, "#1f77b4", "", 2.5, true};
  for (std::size_t e = 0; e < epoch_loss.size(); ++e) {
    loss.add_row({static_cast<std::int64_t>(e), epoch_loss[e]});
    curve.x.push_back(static_cast<double>(e));
    curve.y.push_back(epoch_loss[e]);
  }
  loss.write(dir / "loss.csv", prov);
  write_text(dir / "loss.svg",
             svg::plot({"Training loss", "epoch", "mean squared noise error",
                        prov.config.dump() + " seed=" + std::to_string(prov.seed)},
                       {curve}));
}

}  // namespace

RunOutcome run_train(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  return detail::for_each_seed(
      cfg, out, "train", [&cfg](std::uint64_t seed, const std::filesystem::path& dir, const Provenance& prov) {
        const auto trained = train_for_seed(cfg, seed);
        write_json(dir / "checkpoint.json",
                   with_provenance(checkpoint_to_json(trained.result.model, cfg.schedule), prov));
        write_loss(trained.result.epoch_loss, dir, prov);
        return nlohmann::json{{"checkpoint", (dir / "checkpoint.json").string()},
                              {"final_loss", trained.result.epoch_loss.back()}};
      });
}

RunOutcome run_sample(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  return detail::for_each_seed(
      cfg, out, "sample", [&cfg](std::uint64_t seed, const std::filesystem::path& dir, const Provenance& prov) {
        std::optional<Checkpoint> ckpt;
        if (!cfg.sample.checkpoint.empty()) {
          ckpt = load_checkpoint(cfg.sample.checkpoint);
        } else {
          const auto trained = train_for_seed(cfg, seed);
          ckpt = Checkpoint{trained.result.model, cfg.schedule};
          write_loss(trained.result.epoch_loss, dir, prov);
        }
        Rng rng(derive_seed(seed, stage::anchors));
        const auto pts = reverse_sample(ckpt->model, ckpt->schedule, cfg.sample.n_samples, rng);
        std::vector<std::string> cols;
        for (int k = 0; k < cfg.gmm.dim(); ++k) cols.push_back("x" + std::to_string(k));
        CsvTable table(cols);
        svg::Series dots{{}, {}, "#1f77b4", "samples", 1.8};
        svg::Series means{{}, {}, "#d62728", "mixture means", 5.0};
        for (const auto& p : pts) {
          std::vector<CsvTable::Cell> row(p.data(), p.data() + p.size());
          table.add_row(std::move(row));
          dots.x.push_back(p[0]);
          dots.y.push_back(p.size() > 1 ? p[1] : 0.0);
        }
        for (const auto& m : cfg.gmm.means) {
          means.x.push_back(m[0]);
          means.y.push_back(m.size() > 1 ? m[1] : 0.0);
        }
        table.write(dir / "samples.csv", prov);
        write_text(dir / "samples.svg",
                   svg::plot({"Reverse-diffusion samples", "x", "y",
                              prov.config.dump() + " seed=" + std::to_string(prov.seed)},
                             {dots, means}));
        return nlohmann::json{{"n_samples", pts.size()}};
      });
}

}  // namespace plap::experiments
