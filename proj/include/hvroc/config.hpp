#pragma once

#include "hvroc/hvroc_opt.hpp"
#include "hvroc/lqs_human.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hvroc {

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, std::string key = {})
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), key_(std::move(key)) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

inline const std::vector<std::string> kControllerLabels = {
    "human-alone", "hvroc-highvar", "hvroc-lowvar", "lqr-benchmark"};

struct ScenarioConfig {
    ReachTask task;

    Vec human_q = (Vec(8) << 1, 1, 0.04, 0.04, 0.0004, 0.0004, 0, 0).finished();
    Vec human_r = (Vec(2) << 5e-6, 5e-6).finished();
    bool human_terminal_only = true;
    LqsOptions solver;

    Scalarization scalarization = Scalarization::XAxis;
    ObjectiveWeights highvar = ObjectiveWeights::highvar();
    ObjectiveWeights lowvar = ObjectiveWeights::lowvar();
    AutomationParams init{(Vec(6) << 1, 1, 0.04, 0.04, 0.0004, 0.0004).finished(),
                          (Vec(2) << 5e-6, 5e-6).finished()};
    int max_evals = 2000;
    int restarts = 3;

    Vec lqr_q = (Vec(8) << 1, 1, 0.04, 0.04, 0.0004, 0.0004, 0, 0).finished();
    Vec lqr_r = (Vec(2) << 0.002, 0.002).finished();

    std::vector<std::string> controllers = kControllerLabels;
    std::optional<std::uint64_t> seed;  // run.seed
    int mc_samples = 20000;
    int threads = 1;
    std::string output_dir = "results";

    void validate() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Text of the bundled scenarios "example1" and "example2".
const std::string& bundled_config(const std::string& name);

std::vector<std::string> parse_controller_list(const std::string& list);

inline constexpr const char* kSeedEnvVar = "HVROC_SEED";

// CLI flag, then the environment override, then run.seed, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const ScenarioConfig& cfg);

} // namespace hvroc
