#pragma once

// Command-line input sets. Positional paths are directories (every *.wf plus
// pool.txt and instances.txt when present) or files classified by their
// first directive.

#include <optional>
#include <string>
#include <vector>

#include "wfctl/agents/agents.hpp"
#include "wfctl/analysis/schedule.hpp"
#include "wfctl/workflow/spec.hpp"

namespace wfctl::cli {

struct InputSet {
    std::vector<workflow::WorkflowSpec> specs;
    std::optional<workflow::ResourcePool> pool;
    std::optional<workflow::InstanceCounts> counts;
    std::optional<analysis::Weights> weights;
    std::optional<agents::Scenario> scenario;
};

std::string read_text(const std::string& path);

// Throws Error{Io} / Error{Parse}; a kind of file given twice is a parse error.
InputSet load_inputs(const std::vector<std::string>& paths);

// `weight <activity> <number>` lines.
analysis::Weights parse_weights(std::string_view text);

}  // namespace wfctl::cli
