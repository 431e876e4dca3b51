#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "lakeice/pipeline.hpp"

namespace {

using lakeice::PipelineConfig;

struct CliState {
    PipelineConfig cfg;
    std::string config_path;
};

void add_common_flags(CLI::App* cmd, CliState& state) {
    cmd->add_option("--config", state.config_path, "key=value config file");
    cmd->add_option("--out", state.cfg.out_dir, "output directory (default: out)");
    cmd->add_option("--seed", state.cfg.seed, "RNG seed");
}

void add_setting_flag(CLI::App* cmd, CliState& state) {
    cmd->add_option_function<std::vector<std::string>>(
        "--set",
        [&state](const std::vector<std::string>& pairs) {
            for (const auto& pair : pairs) {
                auto eq = pair.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--set expects key=value, got '" + pair + "'");
                lakeice::apply_setting(state.cfg, pair.substr(0, eq), pair.substr(eq + 1));
            }
        },
        "override any config key (key=value, repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lake ice observation pipeline: classification, frozen-fraction timelines,\n"
                 "ice phenology dates, climate trends and a synthetic validation generator"};
    app.require_subcommand(1);

    CliState state;
    std::string subcommand;

    struct SubcommandSpec {
        const char* name;
        const char* help;
        void (*run)(PipelineConfig);
    };
    const SubcommandSpec specs[] = {
        {"simulate", "generate a ground-truthed synthetic dataset", lakeice::cmd_simulate},
        {"train", "fit the linear SVM on labeled samples", lakeice::cmd_train},
        {"classify", "predict frozen/non-frozen per pixel", lakeice::cmd_classify},
        {"timeline", "build per-winter non-frozen-percentage timelines", lakeice::cmd_timeline},
        {"phenology", "fit freeze-up/break-up dates per winter", lakeice::cmd_phenology},
        {"trends", "fit per-event linear trends across winters", lakeice::cmd_trends},
        {"correlate", "correlate events with climate indicators", lakeice::cmd_correlate},
        {"compare", "mean absolute difference between two timeline files", lakeice::cmd_compare},
        {"report", "render SVG plots and a summary table", lakeice::cmd_report},
    };

    for (const auto& spec : specs) {
        CLI::App* cmd = app.add_subcommand(spec.name, spec.help);
        add_common_flags(cmd, state);
        add_setting_flag(cmd, state);
        std::string name = spec.name;
        if (name == "train" || name == "classify") {
            cmd->add_option("--samples", state.cfg.samples, "samples CSV");
            cmd->add_option("--cost", state.cfg.cost, "SVM misclassification cost");
        }
        if (name == "classify") cmd->add_option("--model", state.cfg.model, "model JSON");
        if (name == "timeline") {
            cmd->add_option("--predictions", state.cfg.predictions, "predictions CSV");
            cmd->add_option("--min-cloud-free", state.cfg.min_cloud_free,
                            "admission threshold (default 0.3)");
        }
        if (name == "phenology") {
            cmd->add_option("--timelines", state.cfg.timelines, "timeline CSV");
            cmd->add_option("--overrides", state.cfg.overrides, "manual corrections CSV");
        }
        if (name == "trends" || name == "correlate" || name == "report")
            cmd->add_option("--phenology", state.cfg.phenology, "phenology JSON");
        if (name == "correlate") cmd->add_option("--meteo", state.cfg.meteo, "meteo CSV");
        if (name == "report")
            cmd->add_option("--timelines", state.cfg.timelines, "timeline CSV");
        if (name == "compare") {
            cmd->add_option("--a", state.cfg.compare_a, "first timeline CSV")->required();
            cmd->add_option("--b", state.cfg.compare_b, "second timeline CSV")->required();
        }
        cmd->callback([&subcommand, name] { subcommand = name; });
    }

    // --config must load before other flags override it; CLI11 applies
    // options in parse order, so pre-scan argv for --config instead
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                lakeice::load_config_file(state.cfg, argv[i + 1]);
            } catch (const lakeice::IoError& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 2;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 1;
            }
            break;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (const auto& spec : specs)
            if (subcommand == spec.name) {
                spec.run(state.cfg);
                return 0;
            }
        std::fprintf(stderr, "error: no subcommand given\n");
        return 1;
    } catch (const lakeice::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
