#include "lrf/model.hpp"

#include "lrf/cascade.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

namespace lrf {

namespace {

using nlohmann::json;

std::size_t mlp_param_count(int in, int hidden, int out) {
    return static_cast<std::size_t>(hidden) * static_cast<std::size_t>(in) + static_cast<std::size_t>(hidden) +
           static_cast<std::size_t>(hidden) * static_cast<std::size_t>(hidden) + static_cast<std::size_t>(hidden) +
           static_cast<std::size_t>(out) * static_cast<std::size_t>(hidden) + static_cast<std::size_t>(out);
}

struct MlpTrace {
    Vector x, h1, h2, out;
};

Vector forward_trace(const Mlp& mlp, const Vector& x, MlpTrace& trace) {
    trace.x = x;
    trace.h1 = (mlp.W[0] * x + mlp.b[0]).array().tanh();
    trace.h2 = (mlp.W[1] * trace.h1 + mlp.b[1]).array().tanh();
    trace.out = mlp.W[2] * trace.h2 + mlp.b[2];
    return trace.out;
}

void backward(const Mlp& mlp, const MlpTrace& trace, const Vector& dout, Mlp& grad) {
    grad.W[2].noalias() += dout * trace.h2.transpose();
    grad.b[2] += dout;
    const Vector da2 =
        (mlp.W[2].transpose() * dout).cwiseProduct((1.0 - trace.h2.array().square()).matrix());
    grad.W[1].noalias() += da2 * trace.h1.transpose();
    grad.b[1] += da2;
    const Vector da1 =
        (mlp.W[1].transpose() * da2).cwiseProduct((1.0 - trace.h1.array().square()).matrix());
    grad.W[0].noalias() += da1 * trace.x.transpose();
    grad.b[0] += da1;
}

Vector concat(const Vector& a, const Vector& b) {
    Vector out(a.size() + b.size());
    out.head(a.size()) = a;
    out.tail(b.size()) = b;
    return out;
}

/// Three-way softmax over {click, abandon, continue} logits.
void softmax3(const Vector& z, double& pc, double& pa, double& pq) {
    const double mx = z.maxCoeff();
    const double e0 = std::exp(z[0] - mx);
    const double e1 = std::exp(z[1] - mx);
    const double e2 = std::exp(z[2] - mx);
    const double s = e0 + e1 + e2;
    pc = e0 / s;
    pa = e1 / s;
    pq = e2 / s;
    // Rounding guard: mathematically pc + pa <= 1, keep the float identity.
    if (pc + pa > 1.0) pa = 1.0 - pc;
}

/// dL/dz from dL/dp for a softmax output p.
Vector softmax_backward(double pc, double pa, double pq, double gc, double ga, double gq) {
    const double dot = gc * pc + ga * pa + gq * pq;
    Vector dz(3);
    dz[0] = pc * (gc - dot);
    dz[1] = pa * (ga - dot);
    dz[2] = pq * (gq - dot);
    return dz;
}

void check_feature_dims(const ModelConfig& cfg, const UserState& state) {
    if (state.user_features.size() != cfg.user_dim)
        throw ValidationError("user feature length " + std::to_string(state.user_features.size()) +
                              " does not match configured " + std::to_string(cfg.user_dim));
    for (const auto& item : state.candidates)
        if (item.item_features.size() != cfg.item_dim)
            throw ValidationError("item feature length " + std::to_string(item.item_features.size()) +
                                  " does not match configured " + std::to_string(cfg.item_dim));
}

const Step& require_step(const TrainExample& ex) {
    if (ex.step == nullptr || ex.mc_return == nullptr)
        throw ContractViolation("training example with null step or return");
    return *ex.step;
}

}  // namespace

const char* to_string(LiftMode mode) {
    switch (mode) {
        case LiftMode::lift_direct: return "lift_direct";
        case LiftMode::no_abandon: return "no_abandon";
        case LiftMode::two_model: return "two_model";
    }
    return "?";
}

LiftMode lift_mode_from_string(const std::string& s) {
    if (s == "lift_direct") return LiftMode::lift_direct;
    if (s == "no_abandon") return LiftMode::no_abandon;
    if (s == "two_model") return LiftMode::two_model;
    throw ValidationError("unknown lift mode: " + s);
}

void validate(const ModelConfig& cfg) {
    if (cfg.user_dim < 1 || cfg.item_dim < 1)
        throw ValidationError("model config: feature dimensions must be positive");
    if (cfg.reward_dim < 1) throw ValidationError("model config: reward dimension must be >= 1");
    if (cfg.hidden_width < 1) throw ValidationError("model config: hidden width must be >= 1");
}

std::size_t ModelConfig::param_count() const {
    const int joint = user_dim + item_dim;
    return mlp_param_count(user_dim, hidden_width, reward_dim) +
           mlp_param_count(joint, hidden_width, reward_dim) +
           mlp_param_count(joint, hidden_width, 3);
}

Mlp Mlp::shaped(int in, int hidden, int out) {
    Mlp mlp;
    mlp.W = {Matrix::Zero(hidden, in), Matrix::Zero(hidden, hidden), Matrix::Zero(out, hidden)};
    mlp.b = {Vector::Zero(hidden), Vector::Zero(hidden), Vector::Zero(out)};
    return mlp;
}

Mlp Mlp::initialized(int in, int hidden, int out, RandomStream& rng) {
    Mlp mlp = shaped(in, hidden, out);
    const auto fill = [&rng](Matrix& w) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
    };
    fill(mlp.W[0]);
    fill(mlp.W[1]);
    // Output layer stays zero: initial rewards are 0, probability logits 0.
    return mlp;
}

Vector Mlp::forward(const Vector& x) const {
    const Vector h1 = (W[0] * x + b[0]).array().tanh();
    const Vector h2 = (W[1] * h1 + b[1]).array().tanh();
    return W[2] * h2 + b[2];
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& w : W) n += static_cast<std::size_t>(w.size());
    for (const auto& v : b) n += static_cast<std::size_t>(v.size());
    return n;
}

void Mlp::set_zero() {
    for (auto& w : W) w.setZero();
    for (auto& v : b) v.setZero();
}

ModelParams ModelParams::initialized(const ModelConfig& cfg, RandomStream& rng) {
    validate(cfg);
    ModelParams p;
    p.cfg = cfg;
    const int joint = cfg.user_dim + cfg.item_dim;
    p.abd_reward = Mlp::initialized(cfg.user_dim, cfg.hidden_width, cfg.reward_dim, rng);
    p.lift_reward = Mlp::initialized(joint, cfg.hidden_width, cfg.reward_dim, rng);
    p.prob_trunk = Mlp::initialized(joint, cfg.hidden_width, 3, rng);
    return p;
}

std::size_t ModelParams::param_count() const {
    return abd_reward.param_count() + lift_reward.param_count() + prob_trunk.param_count();
}

namespace {

void append_block(const Mlp& mlp, Vector& flat, Eigen::Index& at) {
    for (std::size_t l = 0; l < mlp.W.size(); ++l) {
        const Matrix& w = mlp.W[l];
        std::copy(w.data(), w.data() + w.size(), flat.data() + at);
        at += w.size();
        const Vector& v = mlp.b[l];
        std::copy(v.data(), v.data() + v.size(), flat.data() + at);
        at += v.size();
    }
}

void read_block(Mlp& mlp, const Vector& flat, Eigen::Index& at) {
    for (std::size_t l = 0; l < mlp.W.size(); ++l) {
        Matrix& w = mlp.W[l];
        std::copy(flat.data() + at, flat.data() + at + w.size(), w.data());
        at += w.size();
        Vector& v = mlp.b[l];
        std::copy(flat.data() + at, flat.data() + at + v.size(), v.data());
        at += v.size();
    }
}

}  // namespace

Vector ModelParams::to_vector() const {
    Vector flat(static_cast<Eigen::Index>(param_count()));
    Eigen::Index at = 0;
    append_block(abd_reward, flat, at);
    append_block(lift_reward, flat, at);
    append_block(prob_trunk, flat, at);
    return flat;
}

ModelParams ModelParams::from_vector(const ModelConfig& cfg, const Vector& flat) {
    if (flat.size() != static_cast<Eigen::Index>(cfg.param_count()))
        throw ValidationError("flat parameter vector does not match configured architecture");
    ModelParams p;
    p.cfg = cfg;
    const int joint = cfg.user_dim + cfg.item_dim;
    p.abd_reward = Mlp::shaped(cfg.user_dim, cfg.hidden_width, cfg.reward_dim);
    p.lift_reward = Mlp::shaped(joint, cfg.hidden_width, cfg.reward_dim);
    p.prob_trunk = Mlp::shaped(joint, cfg.hidden_width, 3);
    Eigen::Index at = 0;
    read_block(p.abd_reward, flat, at);
    read_block(p.lift_reward, flat, at);
    read_block(p.prob_trunk, flat, at);
    return p;
}

ModelGrad ModelGrad::zeros(const ModelConfig& cfg) {
    ModelGrad g;
    const int joint = cfg.user_dim + cfg.item_dim;
    g.abd_reward = Mlp::shaped(cfg.user_dim, cfg.hidden_width, cfg.reward_dim);
    g.lift_reward = Mlp::shaped(joint, cfg.hidden_width, cfg.reward_dim);
    g.prob_trunk = Mlp::shaped(joint, cfg.hidden_width, 3);
    return g;
}

Vector ModelGrad::to_vector() const {
    Vector flat(static_cast<Eigen::Index>(abd_reward.param_count() + lift_reward.param_count() +
                                          prob_trunk.param_count()));
    Eigen::Index at = 0;
    append_block(abd_reward, flat, at);
    append_block(lift_reward, flat, at);
    append_block(prob_trunk, flat, at);
    return flat;
}

void ModelGrad::axpy_into(ModelParams& params, double step) const {
    const auto apply = [step](Mlp& dst, const Mlp& src) {
        for (std::size_t l = 0; l < dst.W.size(); ++l) {
            dst.W[l] += step * src.W[l];
            dst.b[l] += step * src.b[l];
        }
    };
    apply(params.abd_reward, abd_reward);
    apply(params.lift_reward, lift_reward);
    apply(params.prob_trunk, prob_trunk);
}

void predict_probs(const ModelParams& params, const Vector& user_features,
                   const Vector& item_features, double& p_clk, double& p_abd) {
    const Vector z = params.prob_trunk.forward(concat(user_features, item_features));
    double pq = 0.0;
    softmax3(z, p_clk, p_abd, pq);
}

SlateBeliefs predict_beliefs(const ModelParams& params, const UserState& state) {
    check_feature_dims(params.cfg, state);
    SlateBeliefs sb;
    const Vector abd_out = params.abd_reward.forward(state.user_features);
    sb.r_abd = params.cfg.mode == LiftMode::no_abandon
                   ? RewardVector(RewardVector::Zero(params.cfg.reward_dim))
                   : RewardVector(abd_out);
    sb.items.reserve(state.candidates.size());
    for (const auto& item : state.candidates) {
        const Vector xi = concat(state.user_features, item.item_features);
        ItemBeliefs b;
        const Vector head = params.lift_reward.forward(xi);
        b.r_lift = params.cfg.mode == LiftMode::two_model ? RewardVector(head - abd_out)
                                                          : RewardVector(head);
        double pq = 0.0;
        softmax3(params.prob_trunk.forward(xi), b.p_clk, b.p_abd, pq);
        sb.items.push_back(std::move(b));
    }
    return sb;
}

namespace {

double abd_term_scale(const ModelConfig& cfg) {
    return cfg.mode == LiftMode::lift_direct ? 1.0 : 0.0;
}

double squared_error_losses(const ModelParams& params, const std::vector<TrainExample>& batch,
                            bool abandoned_pages, ModelGrad* grad) {
    if (batch.empty()) throw ContractViolation("loss on empty batch");
    const double scale = 1.0 / (static_cast<double>(batch.size()) * params.cfg.reward_dim);
    const double abd_in_lift = abd_term_scale(params.cfg);
    double loss = 0.0;
    for (const TrainExample& ex : batch) {
        const Step& step = require_step(ex);
        if (abandoned_pages && step.click_pos != 0)
            throw ContractViolation("abandon-loss batch contains a clicked step");
        if (!abandoned_pages && step.click_pos < 1)
            throw ContractViolation("lift-loss batch contains an abandoned step");

        if (abandoned_pages) {
            MlpTrace trace;
            const Vector pred = forward_trace(params.abd_reward, step.state.user_features, trace);
            const Vector diff = pred - *ex.mc_return;
            loss += scale * diff.squaredNorm();
            if (grad) backward(params.abd_reward, trace, Vector(2.0 * scale * diff), grad->abd_reward);
        } else {
            const int cand = step.action.candidate_at(step.click_pos - 1);
            const Vector xi = concat(step.state.user_features,
                                     step.state.candidates[static_cast<std::size_t>(cand)].item_features);
            MlpTrace lift_trace;
            Vector pred = forward_trace(params.lift_reward, xi, lift_trace);
            MlpTrace abd_trace;
            if (abd_in_lift != 0.0)
                pred += abd_in_lift * forward_trace(params.abd_reward, step.state.user_features, abd_trace);
            const Vector diff = pred - *ex.mc_return;
            loss += scale * diff.squaredNorm();
            if (grad) {
                const Vector dpred = 2.0 * scale * diff;
                backward(params.lift_reward, lift_trace, dpred, grad->lift_reward);
                if (abd_in_lift != 0.0 && params.cfg.joint_lift_grad)
                    backward(params.abd_reward, abd_trace, Vector(abd_in_lift * dpred), grad->abd_reward);
            }
        }
    }
    return loss;
}

/// Partial derivatives of P(click position = c) with respect to the
/// per-position (p_clk, p_abd, p_continue) triples, by direct product rules.
/// O(n^2); slates are small.
void cascade_partials(const std::vector<double>& pc, const std::vector<double>& pa,
                      const std::vector<double>& pq, int c, std::vector<double>& dpc,
                      std::vector<double>& dpa, std::vector<double>& dpq) {
    const int n = static_cast<int>(pc.size());
    dpc.assign(pc.size(), 0.0);
    dpa.assign(pc.size(), 0.0);
    dpq.assign(pc.size(), 0.0);
    // pre[i] = product of pq over positions before i (0-based).
    std::vector<double> pre(pc.size() + 1, 1.0);
    for (int i = 0; i < n; ++i) pre[static_cast<std::size_t>(i + 1)] = pre[static_cast<std::size_t>(i)] * pq[static_cast<std::size_t>(i)];

    if (c >= 1) {
        const int ci = c - 1;
        dpc[static_cast<std::size_t>(ci)] = pre[static_cast<std::size_t>(ci)];
        for (int t = 0; t < ci; ++t) {
            double prod = pc[static_cast<std::size_t>(ci)];
            for (int j = 0; j < ci; ++j)
                if (j != t) prod *= pq[static_cast<std::size_t>(j)];
            dpq[static_cast<std::size_t>(t)] = prod;
        }
        return;
    }

    // Abandonment: P0 = sum_i pre[i] * pa[i] + pre[n].
    for (int i = 0; i < n; ++i) dpa[static_cast<std::size_t>(i)] = pre[static_cast<std::size_t>(i)];
    for (int t = 0; t < n; ++t) {
        double acc = 0.0;
        double mid = 1.0;  // product of pq over positions strictly between t and i
        for (int i = t + 1; i < n; ++i) {
            acc += mid * pa[static_cast<std::size_t>(i)];
            mid *= pq[static_cast<std::size_t>(i)];
        }
        acc += mid;  // the fall-off-the-end path
        dpq[static_cast<std::size_t>(t)] = pre[static_cast<std::size_t>(t)] * acc;
    }
}

}  // namespace

double loss_abd(const ModelParams& params, const std::vector<TrainExample>& batch) {
    return squared_error_losses(params, batch, true, nullptr);
}

double loss_abd_grad(const ModelParams& params, const std::vector<TrainExample>& batch,
                     ModelGrad& grad) {
    return squared_error_losses(params, batch, true, &grad);
}

double loss_lift(const ModelParams& params, const std::vector<TrainExample>& batch) {
    return squared_error_losses(params, batch, false, nullptr);
}

double loss_lift_grad(const ModelParams& params, const std::vector<TrainExample>& batch,
                      ModelGrad& grad) {
    return squared_error_losses(params, batch, false, &grad);
}

namespace {

double click_loss_impl(const ModelParams& params, const std::vector<TrainExample>& batch,
                       ModelGrad* grad) {
    if (batch.empty()) throw ContractViolation("loss on empty batch");
    const double scale = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;

    std::vector<double> pc, pa, pq, dpc, dpa, dpq;
    std::vector<MlpTrace> traces;
    for (const TrainExample& ex : batch) {
        const Step& step = require_step(ex);
        check_feature_dims(params.cfg, step.state);
        const int n = static_cast<int>(step.state.candidates.size());
        pc.assign(static_cast<std::size_t>(n), 0.0);
        pa.assign(static_cast<std::size_t>(n), 0.0);
        pq.assign(static_cast<std::size_t>(n), 0.0);
        traces.assign(static_cast<std::size_t>(n), MlpTrace{});
        for (int pos = 0; pos < n; ++pos) {
            const int cand = step.action.candidate_at(pos);
            const Vector xi = concat(step.state.user_features,
                                     step.state.candidates[static_cast<std::size_t>(cand)].item_features);
            const Vector z = forward_trace(params.prob_trunk, xi, traces[static_cast<std::size_t>(pos)]);
            softmax3(z, pc[static_cast<std::size_t>(pos)], pa[static_cast<std::size_t>(pos)],
                     pq[static_cast<std::size_t>(pos)]);
        }

        const cascade::SlateProbs sp(Eigen::Map<const Vector>(pc.data(), n),
                                     Eigen::Map<const Vector>(pa.data(), n));
        loss -= scale * cascade::log_likelihood(sp, step.click_pos);

        if (grad) {
            const Vector probs = cascade::click_position_probs(sp);
            const double p_obs = probs[step.click_pos];
            if (p_obs > cascade::kProbFloor) {
                cascade_partials(pc, pa, pq, step.click_pos, dpc, dpa, dpq);
                const double dl_dp = -scale / p_obs;
                for (int pos = 0; pos < n; ++pos) {
                    const std::size_t p = static_cast<std::size_t>(pos);
                    if (dpc[p] == 0.0 && dpa[p] == 0.0 && dpq[p] == 0.0) continue;
                    const Vector dz = softmax_backward(pc[p], pa[p], pq[p], dl_dp * dpc[p],
                                                       dl_dp * dpa[p], dl_dp * dpq[p]);
                    backward(params.prob_trunk, traces[p], dz, grad->prob_trunk);
                }
            }
            // Floored outcomes contribute a constant; no gradient.
        }
    }
    return loss;
}

}  // namespace

double loss_click(const ModelParams& params, const std::vector<TrainExample>& batch) {
    return click_loss_impl(params, batch, nullptr);
}

double loss_click_grad(const ModelParams& params, const std::vector<TrainExample>& batch,
                       ModelGrad& grad) {
    return click_loss_impl(params, batch, &grad);
}

void validate(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    if (cfg.batch_size < 1) throw ValidationError("batch size must be positive");
    if (cfg.steps_per_iteration < 0) throw ValidationError("steps per iteration must be >= 0");
}

namespace {

double sgd_on_pool(ModelParams& params, const std::vector<TrainExample>& pool,
                   const TrainConfig& cfg, RandomStream& rng,
                   double (*loss_grad)(const ModelParams&, const std::vector<TrainExample>&,
                                       ModelGrad&)) {
    if (pool.empty() || cfg.steps_per_iteration == 0) return std::numeric_limits<double>::quiet_NaN();
    std::vector<TrainExample> batch(static_cast<std::size_t>(cfg.batch_size));
    double mean_loss = 0.0;
    for (int s = 0; s < cfg.steps_per_iteration; ++s) {
        for (auto& slot : batch) slot = pool[rng.uniform_int(pool.size())];
        ModelGrad grad = ModelGrad::zeros(params.cfg);
        mean_loss += loss_grad(params, batch, grad);
        grad.axpy_into(params, -cfg.learning_rate);
    }
    return mean_loss / cfg.steps_per_iteration;
}

}  // namespace

ModelParams train_iteration(const ModelParams& params, const TrainingSet& data,
                            const TrainConfig& cfg, RandomStream& rng,
                            IterationLosses* losses_out) {
    validate(cfg);
    if (data.empty()) throw RefusalError("train_iteration: empty training set");
    ModelParams out = params;
    const bool train_abd = params.cfg.mode != LiftMode::no_abandon;
    const double l_abd =
        train_abd ? sgd_on_pool(out, data.abandoned, cfg, rng, &loss_abd_grad)
                  : std::numeric_limits<double>::quiet_NaN();
    const double l_lift = sgd_on_pool(out, data.clicked, cfg, rng, &loss_lift_grad);
    const double l_click = sgd_on_pool(out, data.all, cfg, rng, &loss_click_grad);
    if (losses_out) *losses_out = IterationLosses{l_abd, l_lift, l_click};
    return out;
}

namespace {

constexpr char kSnapshotMagic[8] = {'L', 'R', 'F', 'S', 'N', 'A', 'P', '1'};

}  // namespace

void save_snapshot(std::ostream& out, const ModelParams& params, const Vector& weights,
                   double epsilon, ScoreRule rule) {
    json header;
    header["format_version"] = 1;
    header["user_dim"] = params.cfg.user_dim;
    header["item_dim"] = params.cfg.item_dim;
    header["reward_dim"] = params.cfg.reward_dim;
    header["hidden_width"] = params.cfg.hidden_width;
    header["mode"] = to_string(params.cfg.mode);
    header["joint_lift_grad"] = params.cfg.joint_lift_grad;
    header["param_count"] = params.param_count();
    header["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
    header["epsilon"] = epsilon;
    header["score_rule"] = to_string(rule);
    const std::string text = header.dump();

    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    const Vector flat = params.to_vector();
    out.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(flat.size())));
    if (!out) throw std::runtime_error("failed writing model snapshot");
}

Snapshot load_snapshot(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
        throw ValidationError("not a model snapshot file (bad magic)");
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > (1u << 20)) throw ValidationError("model snapshot: corrupt header length");
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw ValidationError("model snapshot: truncated header");
    const json header = json::parse(text);
    if (header.at("format_version").get<int>() != 1)
        throw ValidationError("model snapshot: unsupported format version");

    ModelConfig cfg;
    cfg.user_dim = header.at("user_dim").get<int>();
    cfg.item_dim = header.at("item_dim").get<int>();
    cfg.reward_dim = header.at("reward_dim").get<int>();
    cfg.hidden_width = header.at("hidden_width").get<int>();
    cfg.mode = lift_mode_from_string(header.at("mode").get<std::string>());
    cfg.joint_lift_grad = header.at("joint_lift_grad").get<bool>();
    const std::size_t count = header.at("param_count").get<std::size_t>();
    if (count != cfg.param_count())
        throw ValidationError("model snapshot: parameter count does not match its descriptor");

    Vector flat(static_cast<Eigen::Index>(count));
    in.read(reinterpret_cast<char*>(flat.data()),
            static_cast<std::streamsize>(sizeof(double) * count));
    if (!in) throw ValidationError("model snapshot: truncated parameter payload");

    Snapshot snap{ModelParams::from_vector(cfg, flat), Vector(), 0.0, ScoreRule::cascade_lift};
    const auto w = header.at("weights").get<std::vector<double>>();
    snap.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    snap.epsilon = header.at("epsilon").get<double>();
    snap.rule = score_rule_from_string(header.at("score_rule").get<std::string>());
    return snap;
}

}  // namespace lrf
