#include "lrf/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lrf {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& source, const std::string& text,
                             const json::parse_error& e) {
    // nlohmann reports a byte offset; translate it to a line number.
    std::size_t line = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < limit; ++i)
        if (text[i] == '\n') ++line;
    throw ValidationError(source + ":" + std::to_string(line) + ": " + e.what());
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end())
            throw ValidationError("config: unknown key '" + key + "' at " + path);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void parse_gen(const json& j, GenParams& gen) {
    require_keys(j, "world.gen",
                 {"clk_bias", "clk_scale", "abd_bias", "abd_scale", "reward_bias", "reward_scale",
                  "reward_noise", "offsite_bias", "offsite_noise", "latent_mix",
                  "reward_click_alignment"});
    read(j, "clk_bias", gen.clk_bias);
    read(j, "clk_scale", gen.clk_scale);
    read(j, "abd_bias", gen.abd_bias);
    read(j, "abd_scale", gen.abd_scale);
    read(j, "reward_bias", gen.reward_bias);
    read(j, "reward_scale", gen.reward_scale);
    read(j, "reward_noise", gen.reward_noise);
    read(j, "offsite_bias", gen.offsite_bias);
    read(j, "offsite_noise", gen.offsite_noise);
    read(j, "latent_mix", gen.latent_mix);
    read(j, "reward_click_alignment", gen.reward_click_alignment);
}

void parse_world(const json& j, WorldConfig& world) {
    require_keys(j, "world",
                 {"num_users", "num_items", "feature_dim", "slate_size", "reward_dim", "gamma",
                  "session_continue_prob", "offsite_value_scale", "seed", "gen"});
    read(j, "num_users", world.num_users);
    read(j, "num_items", world.num_items);
    read(j, "feature_dim", world.feature_dim);
    read(j, "slate_size", world.slate_size);
    read(j, "reward_dim", world.reward_dim);
    read(j, "gamma", world.discount.gamma);
    read(j, "session_continue_prob", world.session_continue_prob);
    read(j, "offsite_value_scale", world.offsite_value_scale);
    read(j, "seed", world.seed);
    if (j.contains("gen")) parse_gen(j.at("gen"), world.gen);
}

ExperimentConfig config_from_json(const json& j) {
    require_keys(j, "<root>",
                 {"preset", "world", "train", "buffer", "model", "targets", "epsilon", "iterations",
                  "horizon", "score_rule", "solve_weights", "fixed_weights", "arch_change",
                  "exclude_exploration_clicks", "log_trajectories", "output_dir"});
    ExperimentConfig cfg;
    read(j, "preset", cfg.preset);
    if (j.contains("world")) parse_world(j.at("world"), cfg.world);
    if (j.contains("train")) {
        const json& t = j.at("train");
        require_keys(t, "train", {"learning_rate", "batch_size", "steps_per_iteration", "seed"});
        read(t, "learning_rate", cfg.train.learning_rate);
        read(t, "batch_size", cfg.train.batch_size);
        read(t, "steps_per_iteration", cfg.train.steps_per_iteration);
        read(t, "seed", cfg.train.seed);
    }
    if (j.contains("buffer")) {
        const json& b = j.at("buffer");
        require_keys(b, "buffer", {"capacity", "k"});
        read(b, "capacity", cfg.buffer.capacity);
        read(b, "k", cfg.buffer.k);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        require_keys(m, "model", {"hidden_width", "mode", "joint_lift_grad"});
        read(m, "hidden_width", cfg.model.hidden_width);
        if (m.contains("mode")) cfg.model.mode = lift_mode_from_string(m.at("mode").get<std::string>());
        read(m, "joint_lift_grad", cfg.model.joint_lift_grad);
    }
    if (j.contains("targets") && !j.at("targets").is_null()) {
        const json& t = j.at("targets");
        require_keys(t, "targets", {"alpha"});
        ConstraintTargets targets;
        targets.alpha = t.at("alpha").get<std::vector<double>>();
        cfg.targets = std::move(targets);
    }
    read(j, "epsilon", cfg.epsilon);
    read(j, "iterations", cfg.iterations);
    read(j, "horizon", cfg.horizon);
    if (j.contains("score_rule"))
        cfg.score_rule = score_rule_from_string(j.at("score_rule").get<std::string>());
    read(j, "solve_weights", cfg.solve_weights);
    read(j, "fixed_weights", cfg.fixed_weights);
    if (j.contains("arch_change") && !j.at("arch_change").is_null()) {
        const json& a = j.at("arch_change");
        require_keys(a, "arch_change", {"iteration", "hidden_width"});
        ArchChange change;
        read(a, "iteration", change.iteration);
        read(a, "hidden_width", change.hidden_width);
        cfg.arch_change = change;
    }
    read(j, "exclude_exploration_clicks", cfg.exclude_exploration_clicks);
    read(j, "log_trajectories", cfg.log_trajectories);
    read(j, "output_dir", cfg.output_dir);
    return cfg;
}

// Canonical form covers every result-determining field; provenance-only
// fields (preset name, output_dir) stay out so the hash is stable across
// output locations.
json config_to_json(const ExperimentConfig& cfg) {
    json j;
    json w;
    w["num_users"] = cfg.world.num_users;
    w["num_items"] = cfg.world.num_items;
    w["feature_dim"] = cfg.world.feature_dim;
    w["slate_size"] = cfg.world.slate_size;
    w["reward_dim"] = cfg.world.reward_dim;
    w["gamma"] = cfg.world.discount.gamma;
    w["session_continue_prob"] = cfg.world.session_continue_prob;
    w["offsite_value_scale"] = cfg.world.offsite_value_scale;
    w["seed"] = cfg.world.seed;
    json g;
    g["clk_bias"] = cfg.world.gen.clk_bias;
    g["clk_scale"] = cfg.world.gen.clk_scale;
    g["abd_bias"] = cfg.world.gen.abd_bias;
    g["abd_scale"] = cfg.world.gen.abd_scale;
    g["reward_bias"] = cfg.world.gen.reward_bias;
    g["reward_scale"] = cfg.world.gen.reward_scale;
    g["reward_noise"] = cfg.world.gen.reward_noise;
    g["offsite_bias"] = cfg.world.gen.offsite_bias;
    g["offsite_noise"] = cfg.world.gen.offsite_noise;
    g["latent_mix"] = cfg.world.gen.latent_mix;
    g["reward_click_alignment"] = cfg.world.gen.reward_click_alignment;
    w["gen"] = std::move(g);
    j["world"] = std::move(w);
    j["train"] = {{"learning_rate", cfg.train.learning_rate},
                  {"batch_size", cfg.train.batch_size},
                  {"steps_per_iteration", cfg.train.steps_per_iteration},
                  {"seed", cfg.train.seed}};
    j["buffer"] = {{"capacity", cfg.buffer.capacity}, {"k", cfg.buffer.k}};
    j["model"] = {{"hidden_width", cfg.model.hidden_width},
                  {"mode", to_string(cfg.model.mode)},
                  {"joint_lift_grad", cfg.model.joint_lift_grad}};
    if (cfg.targets)
        j["targets"] = {{"alpha", cfg.targets->alpha}};
    else
        j["targets"] = nullptr;
    j["epsilon"] = cfg.epsilon;
    j["iterations"] = cfg.iterations;
    j["horizon"] = cfg.horizon;
    j["score_rule"] = to_string(cfg.score_rule);
    j["solve_weights"] = cfg.solve_weights;
    j["fixed_weights"] = cfg.fixed_weights;
    if (cfg.arch_change)
        j["arch_change"] = {{"iteration", cfg.arch_change->iteration},
                            {"hidden_width", cfg.arch_change->hidden_width}};
    else
        j["arch_change"] = nullptr;
    j["exclude_exploration_clicks"] = cfg.exclude_exploration_clicks;
    j["log_trajectories"] = cfg.log_trajectories;
    return j;
}

const char* preset_text(const std::string& name) {
    if (name == "lrf-vs-ctr") {
        return R"({
  "world": {
    "num_users": 16, "num_items": 40, "feature_dim": 4, "slate_size": 5, "reward_dim": 1,
    "gamma": 0.9, "session_continue_prob": 0.75, "offsite_value_scale": 1.0, "seed": 101,
    "gen": {"clk_scale": 1.8, "abd_scale": 2.2, "reward_click_alignment": 0.25}
  },
  "train": {"learning_rate": 0.02, "batch_size": 32, "steps_per_iteration": 120, "seed": 1},
  "buffer": {"capacity": 120, "k": 24},
  "model": {"hidden_width": 32, "mode": "lift_direct"},
  "epsilon": 0.15, "iterations": 24, "horizon": 10,
  "score_rule": "cascade_lift", "solve_weights": false,
  "output_dir": "out/lrf-vs-ctr"
})";
    }
    if (name == "ablate-lift") {
        return R"({
  "world": {
    "num_users": 16, "num_items": 40, "feature_dim": 4, "slate_size": 5, "reward_dim": 1,
    "gamma": 0.9, "session_continue_prob": 0.75, "offsite_value_scale": 2.5, "seed": 202,
    "gen": {"clk_scale": 1.8, "abd_scale": 2.0, "reward_click_alignment": 0.25}
  },
  "train": {"learning_rate": 0.02, "batch_size": 32, "steps_per_iteration": 120, "seed": 1},
  "buffer": {"capacity": 120, "k": 24},
  "model": {"hidden_width": 32, "mode": "lift_direct"},
  "epsilon": 0.15, "iterations": 24, "horizon": 10,
  "score_rule": "cascade_lift", "solve_weights": false,
  "output_dir": "out/ablate-lift"
})";
    }
    if (name == "constraint-stability") {
        return R"({
  "world": {
    "num_users": 16, "num_items": 40, "feature_dim": 4, "slate_size": 4, "reward_dim": 2,
    "gamma": 0.9, "session_continue_prob": 0.75, "offsite_value_scale": 1.0, "seed": 303,
    "gen": {"clk_scale": 1.8, "abd_scale": 1.6, "reward_click_alignment": 0.2}
  },
  "train": {"learning_rate": 0.02, "batch_size": 32, "steps_per_iteration": 150, "seed": 1},
  "buffer": {"capacity": 120, "k": 24},
  "model": {"hidden_width": 32, "mode": "lift_direct"},
  "targets": {"alpha": [0.15]},
  "epsilon": 0.25, "iterations": 30, "horizon": 10,
  "score_rule": "cascade_lift", "solve_weights": true,
  "arch_change": {"iteration": 18, "hidden_width": 64},
  "output_dir": "out/constraint-stability"
})";
    }
    if (name == "two-model") {
        return R"({
  "world": {
    "num_users": 16, "num_items": 40, "feature_dim": 4, "slate_size": 4, "reward_dim": 1,
    "gamma": 0.9, "session_continue_prob": 0.7, "offsite_value_scale": 2.0, "seed": 404,
    "gen": {"clk_scale": 1.6, "abd_scale": 1.6, "reward_click_alignment": 0.3}
  },
  "train": {"learning_rate": 0.02, "batch_size": 32, "steps_per_iteration": 120, "seed": 1},
  "buffer": {"capacity": 120, "k": 24},
  "model": {"hidden_width": 32, "mode": "two_model"},
  "epsilon": 0.15, "iterations": 24, "horizon": 10,
  "score_rule": "cascade_lift", "solve_weights": false,
  "output_dir": "out/two-model"
})";
    }
    if (name == "degenerate-world") {
        return R"({
  "world": {
    "num_users": 1, "num_items": 1, "feature_dim": 1, "slate_size": 1, "reward_dim": 1,
    "gamma": 0.9, "session_continue_prob": 1.0, "offsite_value_scale": 0.0, "seed": 7,
    "gen": {"clk_bias": 45.0, "clk_scale": 0.0, "abd_bias": -45.0, "abd_scale": 0.0,
            "reward_noise": 0.0, "offsite_noise": 0.0, "latent_mix": 0.0}
  },
  "train": {"learning_rate": 0.01, "batch_size": 8, "steps_per_iteration": 10, "seed": 1},
  "buffer": {"capacity": 16, "k": 4},
  "model": {"hidden_width": 8, "mode": "lift_direct"},
  "epsilon": 0.0, "iterations": 4, "horizon": 10,
  "score_rule": "cascade_lift", "solve_weights": false,
  "output_dir": "out/degenerate-world"
})";
    }
    return nullptr;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"lrf-vs-ctr", "ablate-lift", "constraint-stability", "two-model", "degenerate-world"};
}

std::string preset_json(const std::string& name) {
    const char* text = preset_text(name);
    if (!text) throw ValidationError("unknown preset: " + name);
    return text;
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig cfg = config_from_json(json::parse(preset_json(name)));
    cfg.preset = name;
    validate(cfg);
    return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source_name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(source_name, text, e);
    }
    if (!j.is_object()) throw ValidationError(source_name + ": config root must be a JSON object");

    std::string preset;
    if (j.contains("preset")) preset = j.at("preset").get<std::string>();
    if (!preset.empty()) {
        json base = json::parse(preset_json(preset));
        base.merge_patch(j);
        j = std::move(base);
    }

    ExperimentConfig cfg;
    try {
        cfg = config_from_json(j);
    } catch (const json::exception& e) {
        throw ValidationError(source_name + ": " + e.what());
    }
    cfg.preset = preset;
    validate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str(), path);
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string run_manifest_json(const ExperimentConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["config_hash"] = fnv1a_hex(canonical_config_json(cfg));
    j["preset"] = cfg.preset;
    j["train_seed"] = cfg.train.seed;
    j["world_seed"] = cfg.world.seed;
    j["iterations"] = cfg.iterations;
    j["algorithm"] = cfg.world.reward_dim >= 2 ? 2 : 1;
    return j.dump(2);
}

}  // namespace lrf
