#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadshield/cluster.hpp"
#include "loadshield/redteam.hpp"
#include "loadshield/scoring.hpp"
#include "loadshield/types.hpp"

namespace loadshield {

struct PipelineConfig {
    std::string readings_csv;
    std::string prices_csv;
    std::string output_dir = "out";

    SeasonRange season{{2009, 6, 1}, {2009, 9, 30}};
    // Scoring may target a different window than model building (next
    // summer's data against this summer's models); absent means `season`.
    std::optional<SeasonRange> score_season;
    DayClassFilter day_class = DayClassFilter::all;
    std::vector<std::string> industries;  // empty = all industries present

    Linkage linkage = Linkage::average;
    int k_max = 5;

    ScoringParams scoring;
    std::optional<double> flat_price;  // nullopt = auto (mean of the spot curve)

    double vsp_anomalous = 0.5;
    std::optional<double> wivs_flag_value;  // fixed threshold overrides the percentile
    double wivs_flag_percentile = 95.0;     // resolved over each scored industry

    bool export_masks = false;

    std::vector<AttackSpec> attacks;

    SyntheticPopulationSpec synth;
    SyntheticPriceSpec synth_prices;

    std::uint64_t seed = 1;
};

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const nlohmann::json& j);
// Echo with every default materialized; embedded in run manifests.
nlohmann::json config_to_json(const PipelineConfig& config);

// Writes content to <path>.tmp and renames, so readers never observe a
// partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string file_digest_hex(const std::filesystem::path& path);  // FNV-1a 64

// Pipeline entry points used by the CLI; they throw ConfigError/DataError
// and the CLI maps those to exit codes 2/3.
void cmd_build_models(const PipelineConfig& config);
void cmd_score(const PipelineConfig& config, const std::string& models_dir);
void cmd_redteam(const PipelineConfig& config, const std::string& models_dir);
void cmd_synth(const PipelineConfig& config);

// Loads every model_*.json under the directory, grouped by industry.
std::map<std::string, std::vector<ClusterModel>> load_models(const std::filesystem::path& dir);

}  // namespace loadshield
