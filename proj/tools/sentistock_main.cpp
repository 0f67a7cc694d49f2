#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sentistock/config.hpp"
#include "sentistock/error.hpp"
#include "sentistock/pipeline.hpp"

namespace {

using namespace sentistock;

std::string stage_list() {
    std::string out;
    for (const std::string& name : stage_names()) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

void apply_overrides(RunConfig& cfg, bool seed_set, std::uint64_t seed,
                     const std::string& out_dir) {
    if (seed_set) {
        cfg.seed = seed;
        cfg.hp.seed = seed;
        cfg.synth.seed = seed;
        cfg.grid.seed = seed;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
}

// Streams the requested report rendering to stdout.
int echo_report(const Pipeline& pipeline, const std::string& format) {
    const std::string name = format == "csv" ? "report.csv" : "report.txt";
    std::ifstream in(pipeline.artifact_path(name));
    if (!in) {
        std::cerr << "error: report artifact " << name << " missing\n";
        return 1;
    }
    std::cout << in.rdbuf();
    return 0;
}

int run_one_stage(Pipeline& pipeline, const std::string& name) {
    try {
        pipeline.run_stage(name);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "stage " << name << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"News-sentiment / stock-price interdependency pipeline"};
    std::string config_path;
    std::string out_dir;
    std::string stage;
    std::string format = "text";
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "Run configuration file (INI)");
    app.add_option("--seed", seed, "Override the configured random seed");
    app.add_option("--out", out_dir, "Override the configured output directory");
    app.add_option("--stage", stage,
                   "Run a single stage instead of the full pipeline (" + stage_list() + ")");
    app.add_option("--format", format, "Report rendering printed to stdout: text or csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (config_path.empty()) {
        std::cerr << "error: --config is required\n" << app.help();
        return 2;
    }
    if (format != "text" && format != "csv") {
        std::cerr << "error: --format must be text or csv\n";
        return 2;
    }
    if (!stage.empty()) {
        const auto& names = stage_names();
        if (std::find(names.begin(), names.end(), stage) == names.end()) {
            std::cerr << "error: unknown stage '" << stage << "'; expected one of "
                      << stage_list() << "\n"
                      << app.help();
            return 2;
        }
    }

    RunConfig cfg;
    try {
        cfg = load_run_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    apply_overrides(cfg, app.count("--seed") > 0, seed, out_dir);

    Pipeline pipeline(std::move(cfg));
    if (!stage.empty()) {
        const int code = run_one_stage(pipeline, stage);
        if (code != 0) return code;
        if (stage == "report") return echo_report(pipeline, format);
        return 0;
    }

    try {
        validate_for_pipeline(pipeline.config());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    for (const std::string& name : run_stage_order()) {
        const int code = run_one_stage(pipeline, name);
        if (code != 0) return code;
    }
    return echo_report(pipeline, format);
}
