#pragma once

// Static knowledge base: structural workflow templates by name.
// Dynamic knowledge base: marked global models built from templates, with a
// create / use / retire lifecycle.
//
// On disk:
//   static/<name>.wf     one workflow per file
//   dynamic/<id>.net     composed net with its initial marking
//   dynamic/<id>.meta    `created <n>`, pool lines, instance lines
//   index                `next <id>`

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wfctl/pn/net.hpp"
#include "wfctl/workflow/spec.hpp"

namespace wfctl::kb {

using ModelId = std::uint64_t;

class StaticKB {
public:
    // The template is named after its activity. Throws Error{InvalidSpec} for
    // structurally invalid specs and Error{DuplicateTemplate}.
    std::string register_template(const workflow::WorkflowSpec& spec);

    // Throws Error{NotFound}.
    const workflow::WorkflowSpec& get(std::string_view name) const;
    bool contains(std::string_view name) const;
    const std::map<std::string, workflow::WorkflowSpec, std::less<>>& templates() const { return templates_; }

    bool operator==(const StaticKB&) const = default;

private:
    std::map<std::string, workflow::WorkflowSpec, std::less<>> templates_;
};

struct Model {
    pn::PetriNet net;
    workflow::ResourcePool pool;
    workflow::InstanceCounts counts;
    std::uint64_t created = 0;  // creation order
    bool operator==(const Model&) const = default;
};

class DynamicKB {
public:
    // Composes the named templates with their counts. Throws Error{NotFound}
    // for unknown names and Error{EmptyInstantiation} when no count is
    // positive.
    ModelId instantiate_model(const StaticKB& templates, const workflow::InstanceCounts& counts,
                              const workflow::ResourcePool& pool);

    // Both throw Error{NotFound}.
    const Model& get(ModelId id) const;
    void retire_model(ModelId id);

    const std::map<ModelId, Model>& models() const { return models_; }
    ModelId next_id() const { return next_id_; }

    bool operator==(const DynamicKB&) const = default;

private:
    friend DynamicKB load_dynamic(const std::filesystem::path& dir);

    std::map<ModelId, Model> models_;
    ModelId next_id_ = 1;
};

// Writes the full directory, replacing previous contents of static/ and
// dynamic/. Throws Error{Io}.
void save(const std::filesystem::path& dir, const StaticKB& templates, const DynamicKB& models);

// A missing directory loads as empty. Throws Error{Io} or Error{Parse}.
StaticKB load_static(const std::filesystem::path& dir);
DynamicKB load_dynamic(const std::filesystem::path& dir);

// `template <name> jobs <n>` and `model <id> <activity>=<count> ...` lines.
std::string format_listing(const StaticKB& templates, const DynamicKB& models);

}  // namespace wfctl::kb
