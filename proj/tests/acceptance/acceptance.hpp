#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lrf::acceptance {

/// One acceptance criterion: returns pass/fail and fills a detail line.
struct Criterion {
    int number = 0;
    std::string title;
    std::function<bool(std::string& detail)> run;
};

std::vector<Criterion>& registry();
void add(int number, std::string title, std::function<bool(std::string&)> fn);

void register_math();
void register_learning();
void register_experiments();

int run_cli(int argc, char** argv);

}  // namespace lrf::acceptance
