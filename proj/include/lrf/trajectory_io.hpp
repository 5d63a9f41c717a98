#pragma once

#include "lrf/domain.hpp"

#include <iosfwd>
#include <vector>

namespace lrf {

/// Line-delimited trajectory log: one JSON object per step with fields
/// trajectory_id, step_index, user_id, item_ids (display order), click_pos,
/// reward. The format is documented in the README and stable across
/// versions. Features and exploration annotations are not part of the log.
void write_trajectory_log(std::ostream& out, const std::vector<Trajectory>& trajectories,
                          std::uint64_t first_id = 0);

struct LoggedStep {
    std::uint64_t trajectory_id = 0;
    int step_index = 0;
    std::string user_id;
    std::vector<std::string> item_ids;
    int click_pos = 0;
    RewardVector reward;
};

std::vector<LoggedStep> read_trajectory_log(std::istream& in);

}  // namespace lrf
