#include "hvroc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hvroc {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(trim(cur));
    return out;
}

struct Value {
    std::string text;
    int line;
    std::string key;

    [[noreturn]] void fail(const std::string& why) const { throw ConfigError(key + ": " + why, line, key); }

    double number() const
    {
        double v = 0.0;
        const char* b = text.data();
        const char* e = b + text.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || text.empty())
            fail("expected a number, got '" + text + "'");
        return v;
    }

    long long integer() const
    {
        long long v = 0;
        const char* b = text.data();
        const char* e = b + text.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || text.empty())
            fail("expected an integer, got '" + text + "'");
        return v;
    }

    std::uint64_t u64() const
    {
        std::uint64_t v = 0;
        const char* b = text.data();
        const char* e = b + text.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || text.empty())
            fail("expected an unsigned integer, got '" + text + "'");
        return v;
    }

    bool boolean() const
    {
        if (text == "true" || text == "1")
            return true;
        if (text == "false" || text == "0")
            return false;
        fail("expected true or false, got '" + text + "'");
    }

    Vec vector(int size) const
    {
        const auto parts = split(text, ',');
        if (static_cast<int>(parts.size()) != size)
            fail("expected " + std::to_string(size) + " comma-separated numbers");
        Vec v(size);
        for (int i = 0; i < size; ++i)
            v(i) = Value{parts[i], line, key}.number();
        return v;
    }

    ObjectiveWeights weights() const
    {
        const Vec v = vector(4);
        return {v(0), v(1), v(2), v(3)};
    }
};

using Setter = std::function<void(ScenarioConfig&, const Value&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> m = {
        {"task.mass", [](auto& c, const Value& v) { c.task.mass = v.number(); }},
        {"task.dt", [](auto& c, const Value& v) { c.task.dt = v.number(); }},
        {"task.tau1", [](auto& c, const Value& v) { c.task.tau1 = v.number(); }},
        {"task.tau2", [](auto& c, const Value& v) { c.task.tau2 = v.number(); }},
        {"task.sigma_u", [](auto& c, const Value& v) { c.task.sigma_u = v.number(); }},
        {"task.sigma_omega", [](auto& c, const Value& v) { c.task.sigma_omega_diag = v.vector(6); }},
        {"task.p0", [](auto& c, const Value& v) { c.task.p0 = v.vector(2); }},
        {"task.p_ref", [](auto& c, const Value& v) { c.task.p_ref = v.vector(2); }},
        {"task.N", [](auto& c, const Value& v) {
             const auto n = v.integer();
             if (n < 2 || n > 100000)
                 v.fail("must be in [2, 100000]");
             c.task.N = static_cast<int>(n);
         }},
        {"human.q", [](auto& c, const Value& v) { c.human_q = v.vector(8); }},
        {"human.r", [](auto& c, const Value& v) { c.human_r = v.vector(2); }},
        {"human.terminal_only", [](auto& c, const Value& v) { c.human_terminal_only = v.boolean(); }},
        {"solver.tol", [](auto& c, const Value& v) { c.solver.tol = v.number(); }},
        {"solver.max_iter", [](auto& c, const Value& v) { c.solver.max_iter = static_cast<int>(v.integer()); }},
        {"objective.scalarization", [](auto& c, const Value& v) {
             try {
                 c.scalarization = parse_scalarization(v.text);
             } catch (const Error&) {
                 v.fail("expected x-axis or trace");
             }
         }},
        {"objective.highvar", [](auto& c, const Value& v) { c.highvar = v.weights(); }},
        {"objective.lowvar", [](auto& c, const Value& v) { c.lowvar = v.weights(); }},
        {"optimizer.q0", [](auto& c, const Value& v) { c.init.q = v.vector(6); }},
        {"optimizer.r0", [](auto& c, const Value& v) { c.init.r = v.vector(2); }},
        {"optimizer.max_evals", [](auto& c, const Value& v) { c.max_evals = static_cast<int>(v.integer()); }},
        {"optimizer.restarts", [](auto& c, const Value& v) { c.restarts = static_cast<int>(v.integer()); }},
        {"lqr.q", [](auto& c, const Value& v) { c.lqr_q = v.vector(8); }},
        {"lqr.r", [](auto& c, const Value& v) { c.lqr_r = v.vector(2); }},
        {"run.controllers", [](auto& c, const Value& v) {
             try {
                 c.controllers = parse_controller_list(v.text);
             } catch (const ConfigError& e) {
                 v.fail(e.what());
             }
         }},
        {"run.seed", [](auto& c, const Value& v) { c.seed = v.u64(); }},
        {"run.threads", [](auto& c, const Value& v) { c.threads = static_cast<int>(v.integer()); }},
        {"mc.samples", [](auto& c, const Value& v) { c.mc_samples = static_cast<int>(v.integer()); }},
        {"output.dir", [](auto& c, const Value& v) { c.output_dir = v.text; }},
    };
    return m;
}

} // namespace

std::vector<std::string> parse_controller_list(const std::string& list)
{
    std::vector<std::string> out;
    for (const auto& item : split(list, ',')) {
        if (item.empty())
            continue;
        if (std::find(kControllerLabels.begin(), kControllerLabels.end(), item) == kControllerLabels.end())
            throw ConfigError("unknown controller '" + item + "'");
        if (std::find(out.begin(), out.end(), item) == out.end())
            out.push_back(item);
    }
    if (out.empty())
        throw ConfigError("controller list is empty");
    return out;
}

void ScenarioConfig::validate() const
{
    try {
        task.validate();
    } catch (const InvalidTask& e) {
        throw ConfigError(std::string("task: ") + e.what(), 0, "task");
    }
    auto nonneg = [](const Vec& v, const char* key) {
        if (!v.allFinite() || (v.array() < 0.0).any())
            throw ConfigError(std::string(key) + ": entries must be nonnegative", 0, key);
    };
    auto positive = [](const Vec& v, const char* key) {
        if (!v.allFinite() || (v.array() <= 0.0).any())
            throw ConfigError(std::string(key) + ": entries must be positive", 0, key);
    };
    nonneg(human_q, "human.q");
    positive(human_r, "human.r");
    nonneg(init.q, "optimizer.q0");
    positive(init.r, "optimizer.r0");
    nonneg(lqr_q, "lqr.q");
    positive(lqr_r, "lqr.r");
    if (!(solver.tol >= 0.0) || solver.max_iter < 1)
        throw ConfigError("solver: tol must be >= 0 and max_iter >= 1", 0, "solver");
    for (const auto* w : {&highvar, &lowvar}) {
        try {
            w->validate();
        } catch (const InvalidCost& e) {
            throw ConfigError(std::string("objective: ") + e.what(), 0, "objective");
        }
    }
    if (max_evals < 1 || restarts < 1)
        throw ConfigError("optimizer: max_evals and restarts must be >= 1", 0, "optimizer");
    if (mc_samples < 2)
        throw ConfigError("mc.samples must be >= 2", 0, "mc.samples");
    if (threads < 1)
        throw ConfigError("run.threads must be >= 1", 0, "run.threads");
    if (controllers.empty())
        throw ConfigError("run.controllers is empty", 0, "run.controllers");
    if (output_dir.empty())
        throw ConfigError("output.dir is empty", 0, "output.dir");
}

ScenarioConfig parse_config(const std::string& text)
{
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (line == 1 && s.rfind("\xEF\xBB\xBF", 0) == 0)
            s.erase(0, 3);
        const auto hash = s.find('#');
        if (hash != std::string::npos)
            s.erase(hash);
        s = trim(s);
        if (s.empty())
            continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError("malformed section header", line);
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line);
        std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError("empty key", line);
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("unknown key '" + key + "'", line, key);
        it->second(cfg, Value{value, line, key});
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

const std::string& bundled_config(const std::string& name)
{
    static const std::map<std::string, std::string> bundled = {
        {"example1",
         "# Example 1: manipulation of the human hand\n"
         "task.mass = 1\n"
         "task.dt = 0.01\n"
         "task.tau1 = 0.04\n"
         "task.tau2 = 0.04\n"
         "task.sigma_u = 0.5\n"
         "task.sigma_omega = 0.02, 0.02, 0.2, 0.2, 1, 1\n"
         "task.p0 = 0, 0\n"
         "task.p_ref = 0.1, 0.1\n"
         "task.N = 42\n"
         "human.q = 1, 1, 0.04, 0.04, 0.0004, 0.0004, 0, 0\n"
         "human.r = 5e-6, 5e-6\n"
         "output.dir = results/example1\n"},
        {"example2",
         "# Example 2: handheld tool moved over a longer distance\n"
         "task.mass = 10\n"
         "task.dt = 0.01\n"
         "task.tau1 = 0.04\n"
         "task.tau2 = 0.04\n"
         "task.sigma_u = 0.5\n"
         "task.sigma_omega = 0.02, 0.02, 0.2, 0.2, 1, 1\n"
         "task.p0 = 0, 0\n"
         "task.p_ref = 0.5, 0.5\n"
         "task.N = 96\n"
         "human.q = 1, 1, 0.04, 0.04, 0.0004, 0.0004, 0, 0\n"
         "human.r = 5e-6, 5e-6\n"
         "output.dir = results/example2\n"},
    };
    const auto it = bundled.find(name);
    if (it == bundled.end())
        throw ConfigError("no bundled scenario named '" + name + "'");
    return it->second;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const ScenarioConfig& cfg)
{
    if (cli)
        return *cli;
    if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
        std::uint64_t v = 0;
        const std::string s(env);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ConfigError(std::string(kSeedEnvVar) + " is not an unsigned integer");
        return v;
    }
    return cfg.seed.value_or(0);
}

} // namespace hvroc
