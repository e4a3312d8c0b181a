#pragma once

#include <string>

#include "config.hpp"

namespace sympl::cli {

struct Output {
    std::string body;
    std::string summary;  // ep-fisher with CSV: the slope JSON
};

Output cmd_fidelity_sweep(Config& cfg, const RunOptions& opt);
Output cmd_ep_fisher(Config& cfg, const RunOptions& opt);
Output cmd_permute_plan(Config& cfg, const RunOptions& opt);
Output cmd_scatter(Config& cfg, const RunOptions& opt);
Output cmd_dv_teleport(Config& cfg, const RunOptions& opt);
Output cmd_dilate(Config& cfg, const RunOptions& opt);

}  // namespace sympl::cli
