#include "plap/score_model.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace plap {
namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd silu(const Eigen::MatrixXd& a) {
  return a.unaryExpr([](double z) { return z * sigmoid(z); });
}

Eigen::MatrixXd silu_derivative(const Eigen::MatrixXd& a) {
  return a.unaryExpr([](double z) {
    const double s = sigmoid(z);
    return s * (1.0 + z * (1.0 - s));
  });
}

void check_step(const NoiseSchedule& s, int t) {
  if (t < 0 || t >= s.steps()) throw std::out_of_range("timestep outside schedule");
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Eigen::MatrixXd from_row_major(const std::vector<double>& v, Eigen::Index rows,
                               Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols)
    throw std::invalid_argument("weight array does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

// ---------------------------------------------------------------- schedule --

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
  if (betas.empty()) throw std::invalid_argument("schedule needs at least one step");
  NoiseSchedule s;
  s.betas = std::move(betas);
  // alpha = 1 - prod(1 - beta) in log space, exact for small alphas.
  double log_keep = 0.0;
  for (double b : s.betas) {
    if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("betas must lie in [0, 1)");
    log_keep += std::log1p(-b);
    s.alphas.push_back(-std::expm1(log_keep));
  }
  return s;
}

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw std::invalid_argument("schedule needs at least one step");
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    betas[i] = beta_start + (beta_end - beta_start) * frac;
  }
  return from_betas(std::move(betas));
}

NoiseSchedule NoiseSchedule::standard() {
  return linear(kDefaultSteps, kDefaultBetaStart, kDefaultBetaEnd);
}

double NoiseSchedule::alpha(int t) const {
  check_step(*this, t);
  return alphas[static_cast<std::size_t>(t)];
}

double NoiseSchedule::beta(int t) const {
  check_step(*this, t);
  return betas[static_cast<std::size_t>(t)];
}

Point perturb(const Point& x0, double alpha, const Point& epsilon) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  return std::sqrt(1.0 - alpha) * x0 + std::sqrt(alpha) * epsilon;
}

Perturbation forward_perturb(const Point& x0, int t, const NoiseSchedule& schedule, Rng& rng) {
  Point eps = rng.normal_vector(static_cast<int>(x0.size()));
  Point xt = perturb(x0, schedule.alpha(t), eps);
  return {std::move(xt), std::move(eps)};
}

Eigen::VectorXd sinusoidal_embed(int t, int dim, double base) {
  if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("embedding dim must be even");
  const int half = dim / 2;
  Eigen::VectorXd e(dim);
  for (int j = 0; j < half; ++j) {
    const double w = std::pow(base, -static_cast<double>(j) / half);
    e[2 * j] = std::sin(t * w);
    e[2 * j + 1] = std::cos(t * w);
  }
  return e;
}

// ------------------------------------------------------------------- model --

MlpScoreModel::MlpScoreModel(const MlpConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.input_dim < 1 || cfg.hidden_width < 1)
    throw std::invalid_argument("model dimensions must be positive");
  if (cfg.embed_dim < 2 || cfg.embed_dim % 2 != 0)
    throw std::invalid_argument("embedding dim must be even");
  const int fan_in = cfg.input_dim + cfg.embed_dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Rng rng(seed);
  w1_.resize(cfg.hidden_width, fan_in);
  b1_.resize(cfg.hidden_width);
  for (Eigen::Index r = 0; r < w1_.rows(); ++r)
    for (Eigen::Index c = 0; c < w1_.cols(); ++c) w1_(r, c) = bound * (2.0 * rng.uniform() - 1.0);
  for (Eigen::Index r = 0; r < b1_.size(); ++r) b1_[r] = bound * (2.0 * rng.uniform() - 1.0);
  w2_ = Eigen::MatrixXd::Zero(cfg.input_dim, cfg.hidden_width);
  b2_ = Eigen::VectorXd::Zero(cfg.input_dim);
}

Eigen::MatrixXd MlpScoreModel::inputs(const Eigen::MatrixXd& x, std::span<const int> t) const {
  if (x.rows() != cfg_.input_dim) throw std::invalid_argument("input dimension mismatch");
  if (static_cast<Eigen::Index>(t.size()) != x.cols())
    throw std::invalid_argument("one timestep per sample required");
  Eigen::MatrixXd z(cfg_.input_dim + cfg_.embed_dim, x.cols());
  z.topRows(cfg_.input_dim) = x;
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    z.col(i).tail(cfg_.embed_dim) = sinusoidal_embed(t[i], cfg_.embed_dim, cfg_.embed_base);
  return z;
}

Point MlpScoreModel::predict_noise(const Point& x, int t) const {
  const int ts[] = {t};
  const Eigen::MatrixXd z = inputs(x, ts);
  const Eigen::MatrixXd h = silu((w1_ * z).colwise() + b1_);
  return w2_ * h.col(0) + b2_;
}

double MlpScoreModel::loss_and_gradient(const Eigen::MatrixXd& x_t, std::span<const int> t,
                                        const Eigen::MatrixXd& eps, Gradient* grad) const {
  if (eps.rows() != x_t.rows() || eps.cols() != x_t.cols())
    throw std::invalid_argument("noise targets must match inputs");
  const double batch = static_cast<double>(x_t.cols());
  const Eigen::MatrixXd z = inputs(x_t, t);
  const Eigen::MatrixXd pre = (w1_ * z).colwise() + b1_;
  const Eigen::MatrixXd h = silu(pre);
  const Eigen::MatrixXd out = (w2_ * h).colwise() + b2_;
  const Eigen::MatrixXd diff = out - eps;
  const double loss = diff.squaredNorm() / batch;
  if (grad) {
    const Eigen::MatrixXd d_out = (2.0 / batch) * diff;
    grad->w2.noalias() = d_out * h.transpose();
    grad->b2 = d_out.rowwise().sum();
    const Eigen::MatrixXd d_pre = (w2_.transpose() * d_out).cwiseProduct(silu_derivative(pre));
    grad->w1.noalias() = d_pre * z.transpose();
    grad->b1 = d_pre.rowwise().sum();
  }
  return loss;
}

void MlpScoreModel::sgd_step(const Gradient& grad, double learning_rate) {
  w1_.noalias() -= learning_rate * grad.w1;
  b1_.noalias() -= learning_rate * grad.b1;
  w2_.noalias() -= learning_rate * grad.w2;
  b2_.noalias() -= learning_rate * grad.b2;
}

Eigen::Index MlpScoreModel::parameter_count() const {
  return w1_.size() + b1_.size() + w2_.size() + b2_.size();
}

namespace {

Eigen::VectorXd flatten_parts(const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1,
                              const Eigen::MatrixXd& w2, const Eigen::VectorXd& b2) {
  std::vector<double> flat = row_major(w1);
  flat.insert(flat.end(), b1.data(), b1.data() + b1.size());
  const auto w2_flat = row_major(w2);
  flat.insert(flat.end(), w2_flat.begin(), w2_flat.end());
  flat.insert(flat.end(), b2.data(), b2.data() + b2.size());
  return to_vector(flat);
}

}  // namespace

Eigen::VectorXd MlpScoreModel::parameters() const { return flatten_parts(w1_, b1_, w2_, b2_); }

Eigen::VectorXd MlpScoreModel::flatten(const Gradient& grad) {
  return flatten_parts(grad.w1, grad.b1, grad.w2, grad.b2);
}

void MlpScoreModel::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("parameter count mismatch");
  Eigen::Index at = 0;
  auto take = [&](Eigen::Index n) {
    std::vector<double> v(flat.data() + at, flat.data() + at + n);
    at += n;
    return v;
  };
  w1_ = from_row_major(take(w1_.size()), w1_.rows(), w1_.cols());
  b1_ = to_vector(take(b1_.size()));
  w2_ = from_row_major(take(w2_.size()), w2_.rows(), w2_.cols());
  b2_ = to_vector(take(b2_.size()));
}

std::function<Point(const Point&)> MlpScoreModel::noise_predictor_at(int t) const {
  const Eigen::VectorXd bias =
      b1_ + w1_.rightCols(cfg_.embed_dim) * sinusoidal_embed(t, cfg_.embed_dim, cfg_.embed_base);
  const Eigen::MatrixXd w_x = w1_.leftCols(cfg_.input_dim);
  return [w_x, bias, w2 = w2_, b2 = b2_](const Point& x) -> Point {
    if (x.size() != w_x.cols()) throw std::invalid_argument("input dimension mismatch");
    const Eigen::VectorXd h = silu(w_x * x + bias);
    return w2 * h + b2;
  };
}

nlohmann::json MlpScoreModel::to_json() const {
  return {
      {"input_dim", cfg_.input_dim},
      {"hidden_width", cfg_.hidden_width},
      {"embed_dim", cfg_.embed_dim},
      {"embed_base", cfg_.embed_base},
      {"activation", "silu"},
      {"w1", row_major(w1_)},
      {"b1", std::vector<double>(b1_.data(), b1_.data() + b1_.size())},
      {"w2", row_major(w2_)},
      {"b2", std::vector<double>(b2_.data(), b2_.data() + b2_.size())},
  };
}

MlpScoreModel MlpScoreModel::from_json(const nlohmann::json& j) {
  if (j.value("activation", std::string("silu")) != "silu")
    throw std::invalid_argument("unsupported activation");
  MlpScoreModel m;
  m.cfg_.input_dim = j.at("input_dim").get<int>();
  m.cfg_.hidden_width = j.at("hidden_width").get<int>();
  m.cfg_.embed_dim = j.at("embed_dim").get<int>();
  m.cfg_.embed_base = j.at("embed_base").get<double>();
  const int fan_in = m.cfg_.input_dim + m.cfg_.embed_dim;
  m.w1_ = from_row_major(j.at("w1").get<std::vector<double>>(), m.cfg_.hidden_width, fan_in);
  m.b1_ = to_vector(j.at("b1").get<std::vector<double>>());
  m.w2_ = from_row_major(j.at("w2").get<std::vector<double>>(), m.cfg_.input_dim,
                         m.cfg_.hidden_width);
  m.b2_ = to_vector(j.at("b2").get<std::vector<double>>());
  if (m.b1_.size() != m.cfg_.hidden_width || m.b2_.size() != m.cfg_.input_dim)
    throw std::invalid_argument("bias length does not match model shape");
  return m;
}

bool operator==(const MlpScoreModel& a, const MlpScoreModel& b) {
  const auto& ca = a.cfg_;
  const auto& cb = b.cfg_;
  return ca.input_dim == cb.input_dim && ca.hidden_width == cb.hidden_width &&
         ca.embed_dim == cb.embed_dim && ca.embed_base == cb.embed_base && a.w1_ == b.w1_ &&
         a.b1_ == b.b1_ && a.w2_ == b.w2_ && a.b2_ == b.b2_;
}

// ---------------------------------------------------------------- training --

TrainResult train(const PointList& data, const NoiseSchedule& schedule, const TrainConfig& cfg,
                  const MlpConfig& arch, const EpochCallback& on_epoch) {
  if (data.empty()) throw std::invalid_argument("training data is empty");
  if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0))
    throw std::invalid_argument("training config values must be positive");
  const auto dim = data.front().size();
  for (const auto& x : data)
    if (x.size() != dim) throw std::invalid_argument("training data dimensions differ");
  if (arch.input_dim != dim) throw std::invalid_argument("model input_dim does not match data");

  Rng rng = Rng::substream(cfg.seed, 0);
  TrainResult result{MlpScoreModel(arch, Rng::splitmix64(cfg.seed)), {}};
  MlpScoreModel& model = result.model;
  MlpScoreModel::Gradient grad;

  const auto n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const auto count = std::min(n - start, static_cast<std::size_t>(cfg.batch_size));
      Eigen::MatrixXd xt(dim, static_cast<Eigen::Index>(count));
      Eigen::MatrixXd eps(dim, static_cast<Eigen::Index>(count));
      std::vector<int> ts(count);
      for (std::size_t i = 0; i < count; ++i) {
        ts[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(schedule.steps())));
        auto p = forward_perturb(data[order[start + i]], ts[i], schedule, rng);
        xt.col(static_cast<Eigen::Index>(i)) = p.x_t;
        eps.col(static_cast<Eigen::Index>(i)) = p.epsilon;
      }
      const double loss = model.loss_and_gradient(xt, ts, eps, &grad);
      if (!std::isfinite(loss)) throw DivergenceError("training loss became non-finite", epoch);
      model.sgd_step(grad, cfg.learning_rate);
      total += loss * static_cast<double>(count);
    }
    const double epoch_loss = total / static_cast<double>(n);
    result.epoch_loss.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  return result;
}

Point learned_score(const MlpScoreModel& model, const NoiseSchedule& schedule, const Point& x,
                    int t) {
  const double alpha = schedule.alpha(t);
  if (!(alpha > 0.0)) throw std::domain_error("alpha_t must be > 0 to recover a score");
  return -model.predict_noise(x, t) / std::sqrt(alpha);
}

ScoreField learned_field(const MlpScoreModel& model, const NoiseSchedule& schedule, int t) {
  const double alpha = schedule.alpha(t);
  if (!(alpha > 0.0)) throw std::domain_error("alpha_t must be > 0 to recover a score");
  const double scale = -1.0 / std::sqrt(alpha);
  auto predictor = model.noise_predictor_at(t);
  return ScoreField(
      model.input_dim(),
      [predictor = std::move(predictor), scale](const Point& x) -> Point {
        return scale * predictor(x);
      },
      "learned");
}

PointList reverse_sample(const TimedScore& score, int dim, const NoiseSchedule& schedule, int n,
                         Rng& rng) {
  if (n < 0) throw std::invalid_argument("sample count must be >= 0");
  PointList out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Point x = rng.normal_vector(dim);
    for (int t = schedule.steps() - 1; t >= 0; --t) {
      const double beta = schedule.beta(t);
      x += beta * (0.5 * x + score(x, t));
      if (t > 0) x += std::sqrt(beta) * rng.normal_vector(dim);
      if (!x.allFinite()) throw DivergenceError("reverse sampler state became non-finite", t);
    }
    out.push_back(std::move(x));
  }
  return out;
}

PointList reverse_sample(const MlpScoreModel& model, const NoiseSchedule& schedule, int n,
                         Rng& rng) {
  std::vector<ScoreField> fields;
  fields.reserve(static_cast<std::size_t>(schedule.steps()));
  for (int t = 0; t < schedule.steps(); ++t) fields.push_back(learned_field(model, schedule, t));
  return reverse_sample([&fields](const Point& x, int t) { return fields[t](x); },
                        model.input_dim(), schedule, n, rng);
}

// ------------------------------------------------------------- checkpoints --

nlohmann::json to_json(const NoiseSchedule& s) {
  return {{"steps", s.steps()}, {"betas", s.betas}, {"alphas", s.alphas}};
}

NoiseSchedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("schedule must be an object");
  if (j.contains("betas")) {
    // Checkpoints also carry the derived steps and alphas; they are recomputed.
    for (const auto& [key, _] : j.items())
      if (key != "betas" && key != "steps" && key != "alphas")
        throw std::invalid_argument("unknown schedule key: " + key);
    return NoiseSchedule::from_betas(j.at("betas").get<std::vector<double>>());
  }
  for (const auto& [key, _] : j.items())
    if (key != "steps" && key != "beta_start" && key != "beta_end")
      throw std::invalid_argument("unknown schedule key: " + key);
  return NoiseSchedule::linear(j.value("steps", NoiseSchedule::kDefaultSteps),
                               j.value("beta_start", NoiseSchedule::kDefaultBetaStart),
                               j.value("beta_end", NoiseSchedule::kDefaultBetaEnd));
}

nlohmann::json checkpoint_to_json(const MlpScoreModel& model, const NoiseSchedule& schedule) {
  return {{"schema_version", 1}, {"model", model.to_json()}, {"schedule", to_json(schedule)}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1) throw std::invalid_argument("unsupported checkpoint schema");
  return {MlpScoreModel::from_json(j.at("model")), schedule_from_json(j.at("schedule"))};
}

void save_checkpoint(const std::filesystem::path& path, const MlpScoreModel& model,
                     const NoiseSchedule& schedule) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  out << checkpoint_to_json(model, schedule).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  return checkpoint_from_json(nlohmann::json::parse(in));
}

}  // namespace plap
