#include "gemmforge/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gemmforge/kernels.hpp"
#include "gemmforge/registry.hpp"

namespace gemmforge {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
    Int value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                          std::string(text) + "'");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

std::string multiple_violation(std::string_view outer, index_t outer_v, std::string_view inner,
                               index_t inner_v) {
    return std::string(outer) + "=" + std::to_string(outer_v) + " not a multiple of " +
           std::string(inner) + "=" + std::to_string(inner_v);
}

}  // namespace

std::string_view to_string(OutputFormat format) noexcept {
    switch (format) {
        case OutputFormat::table: return "table";
        case OutputFormat::csv: return "csv";
        case OutputFormat::matlab: return "matlab";
    }
    return "table";
}

OutputFormat parse_output_format(std::string_view text) {
    if (text == "table") return OutputFormat::table;
    if (text == "csv") return OutputFormat::csv;
    if (text == "matlab") return OutputFormat::matlab;
    throw ConfigError("format must be table, csv or matlab, got '" + std::string(text) + "'");
}

std::vector<Shape> parse_shapes(std::string_view text) {
    std::vector<Shape> shapes;
    for (const auto item : split(text, ';')) {
        if (item.empty()) continue;
        const auto dims = split(item, ',');
        if (dims.size() != 3) {
            throw ConfigError("shapes: expected m,n,k but got '" + std::string(item) + "'");
        }
        const Shape s{parse_int<index_t>("shapes", dims[0]), parse_int<index_t>("shapes", dims[1]),
                      parse_int<index_t>("shapes", dims[2])};
        if (s.m == 0 || s.n == 0 || s.k == 0) {
            throw ConfigError("shapes: dimensions must be >= 1 in '" + std::string(item) + "'");
        }
        shapes.push_back(s);
    }
    return shapes;
}

std::vector<std::string> validate(const GotoParams& params) {
    return validate(params, default_registry());
}

std::vector<std::string> validate(const GotoParams& p, const KernelRegistry& registry) {
    std::vector<std::string> v;
    if (p.mr < 1) v.emplace_back("mr >= 1");
    if (p.nr < 1) v.emplace_back("nr >= 1");
    if (p.mc < 1) v.emplace_back("mc >= 1");
    if (p.kc < 1) v.emplace_back("kc >= 1");
    if (p.nc < 1) v.emplace_back("nc >= 1");
    if (p.mr > kMaxTile) v.push_back("mr <= " + std::to_string(kMaxTile));
    if (p.nr > kMaxTile) v.push_back("nr <= " + std::to_string(kMaxTile));
    if (p.mr >= 1 && p.mc % p.mr != 0) v.push_back(multiple_violation("mc", p.mc, "mr", p.mr));
    if (p.nr >= 1 && p.nc % p.nr != 0) v.push_back(multiple_violation("nc", p.nc, "nr", p.nr));
    if (!registry.has_micro_kernel(p.micro_kernel))
        v.push_back("unknown micro-kernel '" + p.micro_kernel + "'");
    return v;
}

std::vector<std::string> validate(const Config& config, const KernelRegistry& registry) {
    std::vector<std::string> v = validate(config.goto_params, registry);
    const auto& b = config.bench;
    if (config.threads < 1) v.emplace_back("threads >= 1");
    if (config.threads > kMaxThreads) v.push_back("threads <= " + std::to_string(kMaxThreads));
    if (b.size_min < 1) v.emplace_back("size_min >= 1");
    if (b.size_min > b.size_max) {
        v.push_back("size_min=" + std::to_string(b.size_min) + " > size_max=" +
                    std::to_string(b.size_max));
    }
    if (b.size_step < 1) v.emplace_back("size_step >= 1");
    if (b.algorithms.empty()) v.emplace_back("algorithms must name at least one algorithm");
    for (const auto& alg : b.algorithms)
        if (!registry.has_variant(alg)) v.push_back("unknown algorithm '" + alg + "'");
    return v;
}

std::vector<ConfigLine> parse_config_text(std::string_view text, std::string_view source) {
    std::vector<ConfigLine> out;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto key = eq == std::string_view::npos ? std::string_view{} : trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + std::string(line) + "'");
        }
        out.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return out;
}

void apply_setting(Config& config, std::string_view key, std::string_view value) {
    auto& g = config.goto_params;
    auto& b = config.bench;
    if (key == "mr") g.mr = parse_int<index_t>(key, value);
    else if (key == "nr") g.nr = parse_int<index_t>(key, value);
    else if (key == "mc") g.mc = parse_int<index_t>(key, value);
    else if (key == "kc") g.kc = parse_int<index_t>(key, value);
    else if (key == "nc") g.nc = parse_int<index_t>(key, value);
    else if (key == "kernel") g.micro_kernel = std::string(value);
    else if (key == "parallel_loop") {
        try {
            config.parallel_loop = parse_loop_choice(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    else if (key == "threads") config.threads = parse_int<index_t>(key, value);
    else if (key == "size_min") b.size_min = parse_int<index_t>(key, value);
    else if (key == "size_max") b.size_max = parse_int<index_t>(key, value);
    else if (key == "size_step") b.size_step = parse_int<index_t>(key, value);
    else if (key == "check") b.check = parse_bool(key, value);
    else if (key == "seed") b.seed = parse_int<std::uint64_t>(key, value);
    else if (key == "format") config.format = parse_output_format(value);
    else if (key == "shapes") b.shapes = parse_shapes(value);
    else if (key == "algorithms") {
        b.algorithms.clear();
        for (const auto name : split(value, ','))
            if (!name.empty()) b.algorithms.emplace_back(name);
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
}

KeyValues environment_overlay() {
    KeyValues env;
    for (const char* name : {"BLISLAB_IC_NT", "BLISLAB_KERNEL", "BLISLAB_THREAD_LOOP"}) {
        if (const char* value = std::getenv(name)) env.emplace_back(name, value);
    }
    return env;
}

Config load_config(const std::optional<std::filesystem::path>& file, const KeyValues& env,
                   const KeyValues& cli) {
    return load_config(file, env, cli, default_registry());
}

Config load_config(const std::optional<std::filesystem::path>& file, const KeyValues& env,
                   const KeyValues& cli, const KernelRegistry& registry) {
    Config config;

    if (file) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot read config file '" + file->string() + "'");
        std::ostringstream text;
        text << in.rdbuf();
        const std::string source = file->string();
        for (const auto& entry : parse_config_text(text.str(), source)) {
            try {
                apply_setting(config, entry.key, entry.value);
            } catch (const ConfigError& e) {
                throw ConfigError(source + ":" + std::to_string(entry.line) + ": " + e.what());
            }
        }
    }

    static constexpr std::pair<std::string_view, std::string_view> kEnvKeys[] = {
        {"BLISLAB_IC_NT", "threads"},
        {"BLISLAB_KERNEL", "kernel"},
        {"BLISLAB_THREAD_LOOP", "parallel_loop"},
    };
    for (const auto& [name, value] : env) {
        for (const auto& [env_name, key] : kEnvKeys) {
            if (name == env_name) {
                try {
                    apply_setting(config, key, value);
                } catch (const ConfigError& e) {
                    throw ConfigError("environment " + name + ": " + e.what());
                }
            }
        }
    }

    for (const auto& [key, value] : cli) apply_setting(config, key, value);

    if (auto violations = validate(config, registry); !violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ConfigError(msg, std::move(violations));
    }
    return config;
}

std::string to_text(const Config& c) {
    std::ostringstream out;
    const auto& g = c.goto_params;
    const auto& b = c.bench;
    out << "mr = " << g.mr << "\n"
        << "nr = " << g.nr << "\n"
        << "mc = " << g.mc << "\n"
        << "kc = " << g.kc << "\n"
        << "nc = " << g.nc << "\n"
        << "kernel = " << g.micro_kernel << "\n"
        << "parallel_loop = " << to_string(c.parallel_loop) << "\n"
        << "threads = " << c.threads << "\n"
        << "size_min = " << b.size_min << "\n"
        << "size_max = " << b.size_max << "\n"
        << "size_step = " << b.size_step << "\n"
        << "check = " << (b.check ? "true" : "false") << "\n"
        << "algorithms = ";
    for (std::size_t i = 0; i < b.algorithms.size(); ++i) out << (i ? "," : "") << b.algorithms[i];
    out << "\n"
        << "seed = " << b.seed << "\n"
        << "format = " << to_string(c.format) << "\n";
    if (!b.shapes.empty()) {
        out << "shapes = ";
        for (std::size_t i = 0; i < b.shapes.size(); ++i) {
            const auto& s = b.shapes[i];
            out << (i ? ";" : "") << s.m << "," << s.n << "," << s.k;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace gemmforge
