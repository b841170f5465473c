#include "cli/inputs.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/text.hpp"
#include "wfctl/error.hpp"
#include "wfctl/workflow/format.hpp"

namespace fs = std::filesystem;

namespace wfctl::cli {

namespace {

template <typename T>
void set_once(std::optional<T>& slot, T value, const std::string& what, const std::string& path) {
    if (slot) throw Error(ErrorKind::Parse, "second " + what + " file: " + path);
    slot = std::move(value);
}

void add_file(InputSet& set, const std::string& path) {
    const auto text = read_text(path);
    const auto lines = text::tokenize(text);
    const std::string head = lines.empty() ? "" : std::string(lines[0].words[0]);
    try {
        if (head == "workflow") {
            for (auto& spec : workflow::parse_workflows(text)) set.specs.push_back(std::move(spec));
        } else if (head == "resource") {
            set_once(set.pool, workflow::parse_pool(text), "pool", path);
        } else if (head == "instances") {
            set_once(set.counts, workflow::parse_instances(text), "instances", path);
        } else if (head == "weight") {
            set_once(set.weights, parse_weights(text), "weights", path);
        } else if (head == "budget" || head == "price" || head == "breakdown") {
            set_once(set.scenario, agents::parse_scenario(text), "scenario", path);
        } else {
            throw Error(ErrorKind::Parse, "cannot tell what kind of file this is", lines.empty() ? 0 : 1);
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Parse) throw;
        throw Error(ErrorKind::Parse, path + ": " + e.what(), e.detail());
    }
}

}  // namespace

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in || fs::is_directory(path)) throw Error(ErrorKind::Io, "cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

InputSet load_inputs(const std::vector<std::string>& paths) {
    InputSet set;
    for (const auto& path : paths) {
        if (!fs::is_directory(path)) {
            add_file(set, path);
            continue;
        }
        std::vector<fs::path> workflows;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".wf") workflows.push_back(entry.path());
        }
        std::sort(workflows.begin(), workflows.end());
        for (const auto& wf : workflows) add_file(set, wf.string());
        for (const char* name : {"pool.txt", "instances.txt"}) {
            if (fs::exists(fs::path(path) / name)) add_file(set, (fs::path(path) / name).string());
        }
    }
    return set;
}

analysis::Weights parse_weights(std::string_view source) {
    analysis::Weights w;
    for (const auto& line : text::tokenize(source)) {
        if (line.words[0] != "weight") text::fail(line.number, "unknown directive '" + std::string(line.words[0]) + "'");
        text::expect_arity(line, 3);
        const auto value = text::to_double(line.words[2]);
        if (!value || !(*value >= 0)) text::fail(line.number, "expected a non-negative weight");
        if (!w.emplace(std::string(line.words[1]), *value).second) {
            text::fail(line.number, "activity " + std::string(line.words[1]) + " weighted twice");
        }
    }
    return w;
}

}  // namespace wfctl::cli
