#include "lrf/trajectory_io.hpp"

#include <nlohmann/json.hpp>

#include <istream>
#include <ostream>
#include <string>

namespace lrf {

using nlohmann::json;

void write_trajectory_log(std::ostream& out, const std::vector<Trajectory>& trajectories,
                          std::uint64_t first_id) {
    std::uint64_t id = first_id;
    for (const Trajectory& traj : trajectories) {
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            const Step& step = traj.steps[t];
            json line;
            line["trajectory_id"] = id;
            line["step_index"] = t;
            line["user_id"] = step.state.user_id;
            std::vector<std::string> item_ids;
            item_ids.reserve(step.state.candidates.size());
            for (int pos = 0; pos < step.action.n(); ++pos)
                item_ids.push_back(
                    step.state.candidates[static_cast<std::size_t>(step.action.candidate_at(pos))].item_id);
            line["item_ids"] = item_ids;
            line["click_pos"] = step.click_pos;
            line["reward"] =
                std::vector<double>(step.reward.data(), step.reward.data() + step.reward.size());
            out << line.dump() << '\n';
        }
        ++id;
    }
}

std::vector<LoggedStep> read_trajectory_log(std::istream& in) {
    std::vector<LoggedStep> steps;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError("trajectory log line " + std::to_string(line_no) + ": " + e.what());
        }
        LoggedStep step;
        step.trajectory_id = j.at("trajectory_id").get<std::uint64_t>();
        step.step_index = j.at("step_index").get<int>();
        step.user_id = j.at("user_id").get<std::string>();
        step.item_ids = j.at("item_ids").get<std::vector<std::string>>();
        step.click_pos = j.at("click_pos").get<int>();
        const auto reward = j.at("reward").get<std::vector<double>>();
        step.reward = Eigen::Map<const Vector>(reward.data(), static_cast<Eigen::Index>(reward.size()));
        steps.push_back(std::move(step));
    }
    return steps;
}

}  // namespace lrf
