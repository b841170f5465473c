#include "wfctl/kb/kb.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "common/text.hpp"
#include "wfctl/error.hpp"
#include "wfctl/workflow/build.hpp"
#include "wfctl/workflow/format.hpp"

namespace fs = std::filesystem;

namespace wfctl::kb {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

// Template names become file names.
bool safe_name(std::string_view name) {
    return !name.empty() && name.front() != '.' && name.find('/') == std::string_view::npos &&
           name.find('\\') == std::string_view::npos;
}

std::vector<fs::path> files_with_extension(const fs::path& dir, std::string_view extension) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string meta_text(const Model& m) {
    return fmt::format("created {}\n", m.created) + workflow::serialize(m.pool) + workflow::serialize(m.counts);
}

// Splits a meta file back into its three parts; pool and instance lines are
// handed to their own parsers.
void parse_meta(std::string_view text, Model& m) {
    std::string pool, counts;
    bool created = false;
    std::size_t number = 0;
    for (std::size_t pos = 0; pos < text.size();) {
        ++number;
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string line(text.substr(pos, eol - pos));
        pos = eol + 1;
        const auto lines = text::tokenize(line);
        if (lines.empty()) continue;
        const auto head = lines[0].words[0];
        if (head == "created") {
            if (created || lines[0].words.size() != 2) text::fail(number, "expected a single 'created <n>'");
            const auto n = text::to_int<std::uint64_t>(lines[0].words[1]);
            if (!n) text::fail(number, "expected integer creation order");
            m.created = *n;
            created = true;
        } else if (head == "resource") {
            pool += line + "\n";
        } else if (head == "instances") {
            counts += line + "\n";
        } else {
            text::fail(number, "unknown directive '" + std::string(head) + "'");
        }
    }
    if (!created) text::fail(number, "missing 'created' line");
    m.pool = workflow::parse_pool(pool);
    m.counts = workflow::parse_instances(counts);
}

}  // namespace

std::string StaticKB::register_template(const workflow::WorkflowSpec& spec) {
    if (!safe_name(spec.activity)) throw Error(ErrorKind::InvalidSpec, "template name unusable as a file name: " + spec.activity);
    if (const auto d = workflow::validate_structure(spec); !d.empty()) {
        throw Error(ErrorKind::InvalidSpec, workflow::format_diagnostics(d));
    }
    if (templates_.contains(spec.activity)) {
        throw Error(ErrorKind::DuplicateTemplate, "template " + spec.activity + " already registered");
    }
    templates_.emplace(spec.activity, spec);
    return spec.activity;
}

const workflow::WorkflowSpec& StaticKB::get(std::string_view name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) throw Error(ErrorKind::NotFound, "no template " + std::string(name));
    return it->second;
}

bool StaticKB::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

ModelId DynamicKB::instantiate_model(const StaticKB& templates, const workflow::InstanceCounts& counts,
                                     const workflow::ResourcePool& pool) {
    std::vector<workflow::WorkflowSpec> specs;
    bool any = false;
    for (const auto& [name, n] : counts) {
        specs.push_back(templates.get(name));
        if (n < 0) throw Error(ErrorKind::Config, "negative count for " + name);
        any = any || n > 0;
    }
    if (!any) throw Error(ErrorKind::EmptyInstantiation, "no template has a positive count");
    const ModelId id = next_id_;
    models_.emplace(id, Model{workflow::compose_global(specs, pool, counts), pool, counts, id});
    ++next_id_;
    return id;
}

const Model& DynamicKB::get(ModelId id) const {
    const auto it = models_.find(id);
    if (it == models_.end()) throw Error(ErrorKind::NotFound, fmt::format("no model {}", id));
    return it->second;
}

void DynamicKB::retire_model(ModelId id) {
    if (models_.erase(id) == 0) throw Error(ErrorKind::NotFound, fmt::format("no model {}", id));
}

void save(const fs::path& dir, const StaticKB& templates, const DynamicKB& models) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::remove_all(dir / "static", ec);
    fs::remove_all(dir / "dynamic", ec);
    fs::create_directories(dir / "static", ec);
    fs::create_directories(dir / "dynamic", ec);
    if (ec) throw Error(ErrorKind::Io, "cannot prepare " + dir.string() + ": " + ec.message());
    for (const auto& [name, spec] : templates.templates()) {
        write_file(dir / "static" / (name + ".wf"), workflow::serialize(spec));
    }
    for (const auto& [id, model] : models.models()) {
        const auto stem = std::to_string(id);
        write_file(dir / "dynamic" / (stem + ".net"), pn::serialize(model.net));
        write_file(dir / "dynamic" / (stem + ".meta"), meta_text(model));
    }
    write_file(dir / "index", fmt::format("next {}\n", models.next_id()));
}

StaticKB load_static(const fs::path& dir) {
    StaticKB kb;
    for (const auto& path : files_with_extension(dir / "static", ".wf")) {
        const auto specs = workflow::parse_workflows(read_file(path));
        if (specs.size() != 1 || specs[0].activity != path.stem().string()) {
            throw Error(ErrorKind::Parse, path.string() + ": expected exactly workflow " + path.stem().string());
        }
        kb.register_template(specs[0]);
    }
    return kb;
}

DynamicKB load_dynamic(const fs::path& dir) {
    DynamicKB kb;
    if (fs::exists(dir / "index")) {
        const auto lines = text::tokenize(read_file(dir / "index"));
        if (lines.size() != 1 || lines[0].words.size() != 2 || lines[0].words[0] != "next") {
            throw Error(ErrorKind::Parse, "index: expected 'next <id>'", 1);
        }
        const auto next = text::to_int<ModelId>(lines[0].words[1]);
        if (!next || *next == 0) throw Error(ErrorKind::Parse, "index: expected a positive id", 1);
        kb.next_id_ = *next;
    }
    for (const auto& path : files_with_extension(dir / "dynamic", ".net")) {
        const auto id = text::to_int<ModelId>(path.stem().string());
        if (!id) throw Error(ErrorKind::Parse, "model file with non-numeric id: " + path.string());
        if (*id >= kb.next_id_) throw Error(ErrorKind::Parse, "model id " + path.stem().string() + " not below index");
        Model m;
        m.net = pn::parse_net(read_file(path));
        auto meta = path;
        meta.replace_extension(".meta");
        parse_meta(read_file(meta), m);
        kb.models_.emplace(*id, std::move(m));
    }
    return kb;
}

std::string format_listing(const StaticKB& templates, const DynamicKB& models) {
    std::string out;
    for (const auto& [name, spec] : templates.templates()) {
        out += fmt::format("template {} jobs {}\n", name, spec.jobs.size());
    }
    for (const auto& [id, model] : models.models()) {
        out += fmt::format("model {}", id);
        for (const auto& [activity, n] : model.counts) out += fmt::format(" {}={}", activity, n);
        out += "\n";
    }
    return out;
}

}  // namespace wfctl::kb
