#pragma once

// Plain-text workflow, pool and instance files.
//
//   workflow <activity-id>
//   job <job-id> duration <n> uses <res>[*k] [<res>[*k] ...]
//   before <a> <b>
//   exclusive <a> <b>
//
//   resource <id> capacity <n>
//   instances <activity-id> <count>
//
// Blank lines and '#' comments are ignored. Errors are Error{Parse} whose
// detail() is the offending line number.

#include <string>
#include <string_view>
#include <vector>

#include "wfctl/workflow/spec.hpp"

namespace wfctl::workflow {

std::vector<WorkflowSpec> parse_workflows(std::string_view text);
ResourcePool parse_pool(std::string_view text);
InstanceCounts parse_instances(std::string_view text);

std::string serialize(const WorkflowSpec& spec);
std::string serialize(const ResourcePool& pool);
std::string serialize(const InstanceCounts& counts);

}  // namespace wfctl::workflow
