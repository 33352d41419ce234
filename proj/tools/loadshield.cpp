// Command-line front end: build-models, score, redteam, synth.
// Exit codes: 0 success, 2 usage/config error, 3 data-quality failure.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "loadshield/log.hpp"
#include "loadshield/pipeline.hpp"
#include "loadshield/version.hpp"

namespace {

struct Overrides {
    std::optional<std::string> readings_csv;
    std::optional<std::string> prices_csv;
    std::optional<std::string> output_dir;
    std::optional<std::string> linkage;
    std::optional<std::string> day_class;
    std::optional<int> k_max;
    std::optional<double> flat_price;
    std::optional<std::uint64_t> seed;
};

void add_override_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--readings", o.readings_csv, "Readings CSV path (overrides config)");
    cmd->add_option("--prices", o.prices_csv, "Prices CSV path (overrides config)");
    cmd->add_option("--output-dir", o.output_dir, "Output directory (overrides config)");
    cmd->add_option("--linkage", o.linkage, "Linkage: single|complete|average|ward");
    cmd->add_option("--day-class", o.day_class, "Day filter: weekday|weekend|all");
    cmd->add_option("--k-max", o.k_max, "Largest cluster count to evaluate");
    cmd->add_option("--flat-price", o.flat_price, "Flat tariff price (currency/kWh)");
    cmd->add_option("--seed", o.seed, "Deterministic generation seed");
}

loadshield::PipelineConfig resolve_config(const std::string& config_path, const Overrides& o) {
    loadshield::PipelineConfig config = loadshield::load_config(config_path);
    if (o.readings_csv) config.readings_csv = *o.readings_csv;
    if (o.prices_csv) config.prices_csv = *o.prices_csv;
    if (o.output_dir) config.output_dir = *o.output_dir;
    if (o.linkage) {
        const auto l = loadshield::linkage_from_string(*o.linkage);
        if (!l) throw loadshield::ConfigError("--linkage must be single|complete|average|ward");
        config.linkage = *l;
    }
    if (o.day_class) {
        const auto f = loadshield::day_class_filter_from_string(*o.day_class);
        if (!f) throw loadshield::ConfigError("--day-class must be weekday|weekend|all");
        config.day_class = *f;
    }
    if (o.k_max) {
        if (*o.k_max < 2) throw loadshield::ConfigError("--k-max must be >= 2");
        config.k_max = *o.k_max;
    }
    if (o.flat_price) {
        if (*o.flat_price <= 0) throw loadshield::ConfigError("--flat-price must be > 0");
        config.flat_price = *o.flat_price;
    }
    if (o.seed) {
        config.seed = *o.seed;
        config.synth.seed = *o.seed;
        config.synth_prices.seed = *o.seed ^ 0x5DEECE66DULL;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Baseline load-profile modeling and incentive-weighted fraud scoring"};
    app.set_version_flag("--version",
                         std::string(loadshield::kToolName) + " " + loadshield::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string models_dir;
    Overrides overrides;

    CLI::App* build = app.add_subcommand("build-models",
                                         "Cluster per-industry profiles into baseline models");
    build->add_option("--config", config_path, "Run configuration (JSON)")->required();
    add_override_options(build, overrides);

    CLI::App* score = app.add_subcommand("score",
                                         "Score inbound profile sets against existing models");
    score->add_option("--config", config_path, "Run configuration (JSON)")->required();
    score->add_option("--models", models_dir, "Directory containing model_*.json")->required();
    add_override_options(score, overrides);

    CLI::App* redteam = app.add_subcommand("redteam", "Write attack fixture CSVs");
    redteam->add_option("--config", config_path, "Run configuration (JSON)")->required();
    redteam->add_option("--models", models_dir, "Directory containing model_*.json")->required();
    add_override_options(redteam, overrides);

    CLI::App* synth = app.add_subcommand("synth",
                                         "Generate a synthetic population and price fixture");
    synth->add_option("--config", config_path, "Run configuration (JSON)")->required();
    add_override_options(synth, overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const loadshield::PipelineConfig config = resolve_config(config_path, overrides);
        if (build->parsed()) {
            loadshield::cmd_build_models(config);
        } else if (score->parsed()) {
            loadshield::cmd_score(config, models_dir);
        } else if (redteam->parsed()) {
            loadshield::cmd_redteam(config, models_dir);
        } else if (synth->parsed()) {
            loadshield::cmd_synth(config);
        }
    } catch (const loadshield::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const loadshield::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
