#include "loadshield/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "loadshield/csv.hpp"
#include "loadshield/features.hpp"
#include "loadshield/ingest.hpp"
#include "loadshield/log.hpp"
#include "loadshield/version.hpp"

namespace loadshield {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& context, const std::set<std::string>& allowed) {
    for (const auto& item : j.items()) {
        if (!allowed.contains(item.key())) {
            throw ConfigError("config: unknown key '" + item.key() + "' in " + context);
        }
    }
}

Date parse_config_date(const json& j, const std::string& context) {
    if (!j.is_string()) throw ConfigError("config: " + context + " must be an ISO date string");
    const auto d = Date::parse_iso(j.get<std::string>());
    if (!d) throw ConfigError("config: bad date '" + j.get<std::string>() + "' in " + context);
    return *d;
}

SeasonRange parse_season(const json& j, const std::string& context) {
    check_keys(j, context, {"start", "end"});
    SeasonRange season{parse_config_date(j.at("start"), context + ".start"),
                       parse_config_date(j.at("end"), context + ".end")};
    if (season.end < season.start) {
        throw ConfigError("config: inverted date range in " + context);
    }
    return season;
}

double wall_ms_since(std::chrono::steady_clock::time_point t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration<double, std::milli>(dt).count();
}

json input_digest(const fs::path& path) {
    return {{"path", path.string()}, {"fnv1a64", file_digest_hex(path)}};
}

std::ifstream open_input(const fs::path& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + what + " '" + path.string() + "'");
    return in;
}

// Deterministic nearest-rank percentile.
double percentile(std::vector<double> values, double pct) {
    if (values.empty()) return std::numeric_limits<double>::infinity();
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(pct / 100.0 * static_cast<double>(values.size()));
    const auto idx = std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, values.size());
    return values[idx - 1];
}

std::string sanitize_for_filename(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (!ok) c = '_';
    }
    return out;
}

struct IngestOutcome {
    std::vector<ProfileSet> sets;
    CleaningReport cleaning;
    std::vector<RejectedRow> parse_rejects;
    std::size_t days_after_filter = 0;
};

IngestOutcome ingest_stream(std::istream& in, const SeasonRange& season, DayClassFilter day_class,
                            const std::vector<std::string>& industries) {
    ParseResult parsed = parse_readings(in);
    for (const auto& r : parsed.rejects) {
        log_warn("readings line " + std::to_string(r.line_no) + " rejected: " + r.reason);
    }
    CleanResult cleaned = clean_profiles(parsed.rows);
    for (const auto& w : cleaned.report.warnings) log_warn(w);

    const auto filtered = filter_calendar(cleaned.profiles, season, day_class);

    std::vector<NormalizedProfile> normalized;
    normalized.reserve(filtered.size());
    for (const auto& p : filtered) normalized.push_back(normalize(p));

    IngestOutcome outcome;
    outcome.sets = assemble_sets(normalized, cleaned.industry_by_business);
    if (!industries.empty()) {
        std::erase_if(outcome.sets, [&](const ProfileSet& s) {
            return std::find(industries.begin(), industries.end(), s.industry_label) ==
                   industries.end();
        });
    }
    outcome.cleaning = std::move(cleaned.report);
    outcome.parse_rejects = std::move(parsed.rejects);
    outcome.days_after_filter = filtered.size();
    return outcome;
}

IngestOutcome ingest_readings(const fs::path& path, const SeasonRange& season,
                              DayClassFilter day_class, const std::vector<std::string>& industries) {
    std::ifstream in = open_input(path, "readings CSV");
    return ingest_stream(in, season, day_class, industries);
}

json ingest_report_json(const IngestOutcome& outcome) {
    json rejects = json::array();
    for (const auto& r : outcome.parse_rejects) {
        rejects.push_back({{"line", r.line_no}, {"reason", r.reason}});
    }
    json j = outcome.cleaning.to_json();
    j["parse_rejects"] = std::move(rejects);
    j["days_after_filter"] = outcome.days_after_filter;
    j["businesses"] = outcome.sets.size();
    return j;
}

json tool_json(const char* command) {
    return {{"name", kToolName}, {"version", kToolVersion}, {"command", command}};
}

void write_features_csv(const fs::path& path, const FeatureMatrix& matrix) {
    std::ostringstream out;
    std::vector<std::string> header{"business_id"};
    for (const char* name : FeatureVector::names()) header.emplace_back(name);
    csv::write_record(out, header);
    for (int i = 0; i < matrix.n_rows(); ++i) {
        std::vector<std::string> row{matrix.row_ids[i]};
        for (double v : matrix.rows[i]) row.push_back(csv::format_double(v));
        csv::write_record(out, row);
    }
    atomic_write(path, out.str());
}

// First n_days dates inside the season matching the day-class filter, so a
// generated fixture survives the calendar filter on its way back in.
std::vector<Date> fixture_dates(const SeasonRange& season, DayClassFilter day_class, int n_days) {
    std::vector<Date> dates;
    const std::int64_t span = season.end.to_days() - season.start.to_days();
    for (std::int64_t d = 0; d <= span && static_cast<int>(dates.size()) < n_days; ++d) {
        const Date date = season.start.plus_days(d);
        const DayClass c = day_class_of(date);
        if (day_class == DayClassFilter::weekday && c != DayClass::weekday) continue;
        if (day_class == DayClassFilter::weekend && c != DayClass::weekend) continue;
        dates.push_back(date);
    }
    if (static_cast<int>(dates.size()) < n_days) {
        throw ConfigError("season " + season.start.to_iso() + ".." + season.end.to_iso() +
                          " has fewer than " + std::to_string(n_days) + " matching days");
    }
    return dates;
}

void append_wide_row(std::ostringstream& out, const std::string& business,
                     const std::string& industry, const Date& date, const PeriodVector& values) {
    std::vector<std::string> row{business, industry, date.to_iso()};
    for (double v : values) row.push_back(csv::format_double(v));
    csv::write_record(out, row);
}

std::vector<std::string> wide_header() {
    std::vector<std::string> header{"business_id", "industry_label", "date"};
    for (int t = 1; t <= kPeriodsPerDay; ++t) {
        char name[8];
        std::snprintf(name, sizeof(name), "p%02d", t);
        header.emplace_back(name);
    }
    return header;
}

struct AttackFixture {
    std::string business_id;
    std::string industry;
    std::vector<Date> dates;
    PeriodVector day_values{};  // kWh-scale raw day, identical across days
};

const ProfileSet& find_set(const std::vector<ProfileSet>& sets, const std::string& business_id) {
    for (const auto& s : sets) {
        if (s.business_id == business_id) return s;
    }
    throw DataError("attack target business '" + business_id + "' not present in inbound data");
}

AttackFixture make_attack_fixture(const AttackSpec& spec, const std::vector<ProfileSet>& real_sets,
                                  const std::map<std::string, std::vector<ClusterModel>>& models,
                                  const IncentiveWeights& weights, const SeasonRange& season,
                                  DayClassFilter day_class, const std::string& id_suffix) {
    const ProfileSet& target = find_set(real_sets, spec.target_business);
    const auto models_it = models.find(target.industry_label);
    if (models_it == models.end()) {
        throw DataError("no models for industry '" + target.industry_label + "' targeted by attack");
    }

    AttackFixture fixture;
    fixture.industry = target.industry_label;
    fixture.dates = fixture_dates(season, day_class, spec.n_days);
    if (spec.kind == AttackSpec::Kind::bypass) {
        fixture.business_id = spec.target_business + "#bypass" + id_suffix;
        fixture.day_values = PeriodVector{};  // a string of zeros
    } else {
        const ClusterModel& baseline = assign_cluster(target, models_it->second);
        std::vector<std::string> warnings;
        fixture.business_id = spec.target_business + "#rcsa" + id_suffix;
        fixture.day_values = rcsa_raw_profile(weights, baseline, spec, &warnings);
        for (const auto& w : warnings) log_warn(w);
    }
    return fixture;
}

std::string render_attack_csv(const std::vector<AttackFixture>& fixtures) {
    std::ostringstream out;
    csv::write_record(out, wide_header());
    for (const auto& f : fixtures) {
        for (const Date& date : f.dates) {
            append_wide_row(out, f.business_id, f.industry, date, f.day_values);
        }
    }
    return out.str();
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
    check_keys(j, "top level",
               {"readings_csv", "prices_csv", "output_dir", "season", "score_season", "day_class",
                "industries", "linkage", "k_max", "confidence_multiplier", "asd_floor",
                "flat_price", "thresholds", "export_masks", "attacks", "synth", "synth_prices",
                "seed"});

    PipelineConfig config;
    if (j.contains("readings_csv")) config.readings_csv = j.at("readings_csv").get<std::string>();
    if (j.contains("prices_csv")) config.prices_csv = j.at("prices_csv").get<std::string>();
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("season")) config.season = parse_season(j.at("season"), "season");
    if (j.contains("score_season")) {
        config.score_season = parse_season(j.at("score_season"), "score_season");
    }
    if (j.contains("day_class")) {
        const auto f = day_class_filter_from_string(j.at("day_class").get<std::string>());
        if (!f) throw ConfigError("config: day_class must be weekday|weekend|all");
        config.day_class = *f;
    }
    if (j.contains("industries")) {
        config.industries = j.at("industries").get<std::vector<std::string>>();
    }
    if (j.contains("linkage")) {
        const auto l = linkage_from_string(j.at("linkage").get<std::string>());
        if (!l) throw ConfigError("config: linkage must be single|complete|average|ward");
        config.linkage = *l;
    }
    if (j.contains("k_max")) {
        config.k_max = j.at("k_max").get<int>();
        if (config.k_max < 2) throw ConfigError("config: k_max must be >= 2");
    }
    if (j.contains("confidence_multiplier")) {
        config.scoring.confidence = j.at("confidence_multiplier").get<double>();
        if (config.scoring.confidence <= 0) {
            throw ConfigError("config: confidence_multiplier must be > 0");
        }
    }
    if (j.contains("asd_floor")) {
        config.scoring.asd_floor = j.at("asd_floor").get<double>();
        if (config.scoring.asd_floor < 0) throw ConfigError("config: asd_floor must be >= 0");
    }
    if (j.contains("flat_price")) {
        const auto& fp = j.at("flat_price");
        if (fp.is_string()) {
            if (fp.get<std::string>() != "auto") {
                throw ConfigError("config: flat_price must be a positive number or \"auto\"");
            }
        } else {
            config.flat_price = fp.get<double>();
            if (*config.flat_price <= 0) throw ConfigError("config: flat_price must be > 0");
        }
    }
    if (j.contains("thresholds")) {
        const auto& t = j.at("thresholds");
        check_keys(t, "thresholds", {"vsp_anomalous", "wivs_percentile", "wivs_value"});
        if (t.contains("vsp_anomalous")) config.vsp_anomalous = t.at("vsp_anomalous").get<double>();
        if (t.contains("wivs_percentile")) {
            config.wivs_flag_percentile = t.at("wivs_percentile").get<double>();
        }
        if (t.contains("wivs_value")) config.wivs_flag_value = t.at("wivs_value").get<double>();
    }
    if (j.contains("export_masks")) config.export_masks = j.at("export_masks").get<bool>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("attacks")) {
        for (const auto& a : j.at("attacks")) {
            check_keys(a, "attacks[]",
                       {"kind", "target_business", "n_days", "beta", "energy_preservation"});
            AttackSpec spec;
            const std::string kind = a.at("kind").get<std::string>();
            if (kind == "bypass") {
                spec.kind = AttackSpec::Kind::bypass;
            } else if (kind == "rcsa") {
                spec.kind = AttackSpec::Kind::rcsa;
            } else {
                throw ConfigError("config: attack kind must be bypass|rcsa");
            }
            spec.target_business = a.at("target_business").get<std::string>();
            if (a.contains("n_days")) spec.n_days = a.at("n_days").get<int>();
            if (spec.n_days < 1) throw ConfigError("config: attack n_days must be >= 1");
            if (a.contains("beta")) spec.beta = a.at("beta").get<double>();
            if (spec.kind == AttackSpec::Kind::rcsa && spec.beta <= 0) {
                throw ConfigError("config: rcsa beta must be > 0");
            }
            if (a.contains("energy_preservation")) {
                spec.energy_preservation = a.at("energy_preservation").get<bool>();
            }
            config.attacks.push_back(std::move(spec));
        }
    }

    config.synth.seed = config.seed;
    config.synth.start_date = config.season.start;
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        check_keys(s, "synth", {"industry", "groups", "noise_std", "n_days", "start_date"});
        if (s.contains("industry")) {
            config.synth.industry_label = s.at("industry").get<std::string>();
        }
        if (s.contains("groups")) {
            config.synth.groups.clear();
            for (const auto& g : s.at("groups")) {
                check_keys(g, "synth.groups[]", {"archetype", "n_businesses"});
                config.synth.groups.push_back(
                    {g.at("archetype").get<std::string>(), g.at("n_businesses").get<int>()});
            }
        }
        if (s.contains("noise_std")) config.synth.noise_std = s.at("noise_std").get<double>();
        if (s.contains("n_days")) config.synth.n_days = s.at("n_days").get<int>();
        if (s.contains("start_date")) {
            config.synth.start_date = parse_config_date(s.at("start_date"), "synth.start_date");
        }
    }

    config.synth_prices.seed = config.seed ^ 0x5DEECE66DULL;
    config.synth_prices.season = config.season;
    if (j.contains("synth_prices")) {
        const auto& s = j.at("synth_prices");
        check_keys(s, "synth_prices", {"n_regions", "jitter"});
        if (s.contains("n_regions")) config.synth_prices.n_regions = s.at("n_regions").get<int>();
        if (s.contains("jitter")) config.synth_prices.jitter = s.at("jitter").get<double>();
    }
    return config;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in = open_input(path, "config");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    return config_from_json(j);
}

json config_to_json(const PipelineConfig& config) {
    json attacks = json::array();
    for (const auto& a : config.attacks) {
        attacks.push_back({{"kind", a.kind == AttackSpec::Kind::bypass ? "bypass" : "rcsa"},
                           {"target_business", a.target_business},
                           {"n_days", a.n_days},
                           {"beta", a.beta},
                           {"energy_preservation", a.energy_preservation}});
    }
    json groups = json::array();
    for (const auto& g : config.synth.groups) {
        groups.push_back({{"archetype", g.archetype}, {"n_businesses", g.n_businesses}});
    }
    json thresholds{{"vsp_anomalous", config.vsp_anomalous},
                    {"wivs_percentile", config.wivs_flag_percentile}};
    if (config.wivs_flag_value) thresholds["wivs_value"] = *config.wivs_flag_value;

    json j{{"readings_csv", config.readings_csv},
           {"prices_csv", config.prices_csv},
           {"output_dir", config.output_dir},
           {"season",
            {{"start", config.season.start.to_iso()}, {"end", config.season.end.to_iso()}}},
           {"day_class", to_string(config.day_class)},
           {"industries", config.industries},
           {"linkage", to_string(config.linkage)},
           {"k_max", config.k_max},
           {"confidence_multiplier", config.scoring.confidence},
           {"asd_floor", config.scoring.asd_floor},
           {"flat_price", config.flat_price ? json(*config.flat_price) : json("auto")},
           {"thresholds", thresholds},
           {"export_masks", config.export_masks},
           {"attacks", attacks},
           {"synth",
            {{"industry", config.synth.industry_label},
             {"groups", groups},
             {"noise_std", config.synth.noise_std},
             {"n_days", config.synth.n_days},
             {"start_date", config.synth.start_date.to_iso()}}},
           {"synth_prices",
            {{"n_regions", config.synth_prices.n_regions},
             {"jitter", config.synth_prices.jitter}}},
           {"seed", config.seed}};
    if (config.score_season) {
        j["score_season"] = {{"start", config.score_season->start.to_iso()},
                             {"end", config.score_season->end.to_iso()}};
    }
    return j;
}

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string file_digest_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "' for digest");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

std::map<std::string, std::vector<ClusterModel>> load_models(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw ConfigError("models directory '" + dir.string() + "' does not exist");
    }
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("model_") && name.ends_with(".json")) {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) {
        throw ConfigError("no model_*.json files in '" + dir.string() + "'");
    }

    std::map<std::string, std::vector<ClusterModel>> models;
    for (const auto& path : paths) {
        std::ifstream in = open_input(path, "model");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw DataError("model '" + path.string() + "': " + e.what());
        }
        ClusterModel model = model_from_json(j);
        models[model.industry_label].push_back(std::move(model));
    }
    for (auto& [industry, list] : models) {
        std::sort(list.begin(), list.end(), [](const ClusterModel& a, const ClusterModel& b) {
            return a.cluster_id < b.cluster_id;
        });
    }
    return models;
}

void cmd_build_models(const PipelineConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out_dir = config.output_dir;

    IngestOutcome outcome =
        ingest_readings(config.readings_csv, config.season, config.day_class, config.industries);
    atomic_write(out_dir / "cleaning_report.json", ingest_report_json(outcome).dump(2) + "\n");

    if (outcome.sets.empty()) {
        throw DataError("no usable profile data after cleaning and filtering; see " +
                        (out_dir / "cleaning_report.json").string());
    }

    std::map<std::string, std::vector<ProfileSet>> by_industry;
    for (auto& set : outcome.sets) by_industry[set.industry_label].push_back(std::move(set));

    const ModelProvenance base_provenance{config.season.start.to_iso(),
                                          config.season.end.to_iso(),
                                          to_string(config.day_class),
                                          to_string(config.linkage),
                                          0,
                                          0.0};

    json industry_counts = json::object();
    int models_written = 0;
    for (const auto& [industry, sets] : by_industry) {
        if (static_cast<int>(sets.size()) < 3) {
            log_warn("industry '" + industry + "' has " + std::to_string(sets.size()) +
                     " businesses, need 3 to cluster; skipped");
            industry_counts[industry] = {{"n_businesses", sets.size()},
                                         {"skipped", "fewer than 3 businesses"}};
            continue;
        }
        const std::string file_tag = sanitize_for_filename(industry);

        FeatureMatrix features = build_feature_matrix(sets);
        write_features_csv(out_dir / ("features_" + file_tag + ".csv"), features);

        const FeatureMatrix standardized = standardize(features);
        const ProximityMatrix prox = proximity(standardized);
        const auto [assignment, diagnostics] = select_k(prox, config.k_max, config.linkage);

        ModelProvenance provenance = base_provenance;
        provenance.selected_k = diagnostics.selected_k;
        provenance.silhouette_mean = diagnostics.mean;

        const auto models = build_cluster_models(sets, assignment, industry);
        for (const auto& model : models) {
            const fs::path path = out_dir / "models" /
                                  ("model_" + file_tag + "_c" + std::to_string(model.cluster_id) +
                                   ".json");
            atomic_write(path, model_to_json(model, provenance).dump(2) + "\n");
            ++models_written;
        }
        atomic_write(out_dir / "models" / ("trace_" + file_tag + ".json"),
                     merge_trace_to_json(assignment.merge_trace).dump(2) + "\n");

        json mean_by_k = json::object();
        for (const auto& [k, mean] : diagnostics.mean_by_k) mean_by_k[std::to_string(k)] = mean;
        json cluster_sizes = json::array();
        for (const auto& model : models) cluster_sizes.push_back(model.n_members());
        industry_counts[industry] = {{"n_businesses", sets.size()},
                                     {"selected_k", diagnostics.selected_k},
                                     {"silhouette_mean", diagnostics.mean},
                                     {"mean_silhouette_by_k", mean_by_k},
                                     {"cluster_sizes", cluster_sizes}};
        log_info("industry '" + industry + "': " + std::to_string(sets.size()) +
                 " businesses, selected k=" + std::to_string(diagnostics.selected_k));
    }
    if (models_written == 0) {
        throw DataError("no industry had enough businesses to build models");
    }

    std::size_t n_businesses = 0;
    for (const auto& [industry, sets] : by_industry) n_businesses += sets.size();
    json manifest{{"tool", tool_json("build-models")},
                  {"config", config_to_json(config)},
                  {"inputs", {{"readings_csv", input_digest(config.readings_csv)}}},
                  {"counts",
                   {{"businesses", n_businesses},
                    {"days_in", outcome.cleaning.days_in},
                    {"days_kept", outcome.cleaning.days_kept},
                    {"days_after_filter", outcome.days_after_filter},
                    {"parse_rejects", outcome.parse_rejects.size()},
                    {"industries", industry_counts},
                    {"models_written", models_written}}},
                  {"timing", {{"wall_ms", wall_ms_since(t0)}}}};
    atomic_write(out_dir / "build_manifest.json", manifest.dump(2) + "\n");
}

void cmd_score(const PipelineConfig& config, const std::string& models_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out_dir = config.output_dir;
    const SeasonRange season = config.score_season.value_or(config.season);

    const auto models = load_models(models_dir);

    std::ifstream prices_in = open_input(config.prices_csv, "prices CSV");
    PriceParseResult prices = parse_price_csv(prices_in);
    for (const auto& w : prices.warnings) log_warn("prices: " + w);
    const SpotPriceCurve curve = average_regions(prices.table, season);
    const IncentiveWeights weights = incentive_weights(curve, config.flat_price);
    atomic_write(out_dir / "weights.json", weights_to_json(weights, curve).dump(2) + "\n");

    IngestOutcome outcome =
        ingest_readings(config.readings_csv, season, config.day_class, config.industries);
    atomic_write(out_dir / "cleaning_report.json", ingest_report_json(outcome).dump(2) + "\n");

    // Attack fixtures are serialized to CSV and re-ingested so they travel
    // the exact code path of real inbound data.
    std::set<std::string> attack_ids;
    if (!config.attacks.empty()) {
        std::vector<AttackFixture> fixtures;
        std::set<std::string> used_ids;
        for (const auto& spec : config.attacks) {
            std::string suffix;
            for (int ordinal = 2;; ++ordinal) {
                AttackFixture f = make_attack_fixture(spec, outcome.sets, models, weights, season,
                                                      config.day_class, suffix);
                if (!used_ids.contains(f.business_id)) {
                    used_ids.insert(f.business_id);
                    fixtures.push_back(std::move(f));
                    break;
                }
                suffix = "." + std::to_string(ordinal);
            }
        }
        atomic_write(out_dir / "attacks.csv", render_attack_csv(fixtures));

        std::ifstream attack_in = open_input(out_dir / "attacks.csv", "attack fixture CSV");
        IngestOutcome attack_outcome = ingest_stream(attack_in, season, config.day_class, {});
        for (auto& set : attack_outcome.sets) {
            attack_ids.insert(set.business_id);
            outcome.sets.push_back(std::move(set));
        }
    }

    json score_rows = json::array();
    std::ostringstream csv_out;
    csv::write_record(csv_out, {"business_id", "industry", "cluster_id", "n_days", "vsp", "isc",
                                "wivs", "flag"});

    if (outcome.sets.empty()) {
        log_warn("empty inbound set: nothing to score");
        atomic_write(out_dir / "scores.csv", csv_out.str());
        atomic_write(out_dir / "scores.json",
                     json{{"reports", score_rows}, {"thresholds", json::object()}}.dump(2) + "\n");
        json manifest{{"tool", tool_json("score")},
                      {"config", config_to_json(config)},
                      {"inputs",
                       {{"readings_csv", input_digest(config.readings_csv)},
                        {"prices_csv", input_digest(config.prices_csv)}}},
                      {"counts", {{"scored", 0}, {"errors", 0}, {"attacks", 0}}},
                      {"timing", {{"wall_ms", wall_ms_since(t0)}}}};
        atomic_write(out_dir / "score_manifest.json", manifest.dump(2) + "\n");
        return;
    }

    struct Row {
        const ProfileSet* set = nullptr;
        bool attack = false;
        bool error = false;
        std::string error_msg;
        ScoreReport report;
    };
    std::vector<Row> rows;
    rows.reserve(outcome.sets.size());
    for (const auto& set : outcome.sets) {
        Row row;
        row.set = &set;
        row.attack = attack_ids.contains(set.business_id);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.set->industry_label, a.attack, a.set->business_id) <
               std::tie(b.set->industry_label, b.attack, b.set->business_id);
    });

    const Thresholds unresolved{config.vsp_anomalous, std::numeric_limits<double>::infinity()};
    const int n_rows = static_cast<int>(rows.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_rows; ++i) {
        Row& row = rows[i];
        const auto it = models.find(row.set->industry_label);
        if (it == models.end()) {
            row.error = true;
            row.error_msg = "no models for industry '" + row.set->industry_label + "'";
            continue;
        }
        try {
            row.report = score_business(*row.set, it->second, weights, config.scoring, unresolved);
        } catch (const std::exception& e) {
            row.error = true;
            row.error_msg = e.what();
        }
    }
    std::size_t scored = 0, errors = 0;
    for (const auto& row : rows) {
        if (row.error) {
            log_warn("business " + row.set->business_id + ": " + row.error_msg);
            ++errors;
        } else {
            ++scored;
        }
    }
    if (scored == 0) {
        throw DataError("scoring failed for all " + std::to_string(errors) + " businesses");
    }

    // Resolve the wivs alert threshold per industry from the scored
    // population, then assign flags. Injected attack fixtures are excluded
    // from the calibration so they cannot raise their own alert bar.
    std::map<std::string, double> wivs_threshold;
    if (config.wivs_flag_value) {
        for (const auto& [industry, list] : models) {
            wivs_threshold[industry] = *config.wivs_flag_value;
        }
    } else {
        std::map<std::string, std::vector<double>> wivs_by_industry;
        for (const auto& row : rows) {
            if (!row.error && !row.attack) {
                wivs_by_industry[row.report.industry_label].push_back(row.report.wivs);
            }
        }
        for (const auto& row : rows) {
            if (row.error) continue;
            const std::string& industry = row.report.industry_label;
            if (!wivs_threshold.contains(industry)) {
                const auto it = wivs_by_industry.find(industry);
                wivs_threshold[industry] =
                    it == wivs_by_industry.end()
                        ? std::numeric_limits<double>::infinity()
                        : percentile(it->second, config.wivs_flag_percentile);
            }
        }
    }
    for (auto& row : rows) {
        if (row.error) continue;
        row.report.flag = AlertLevel::none;
        if (row.report.wivs > wivs_threshold.at(row.report.industry_label)) {
            row.report.flag = AlertLevel::incentive_flagged;
        } else if (row.report.vsp > config.vsp_anomalous) {
            row.report.flag = AlertLevel::anomalous;
        }
    }

    // Emit the score table plus per-cluster series shaped for bar plots,
    // attack rows last within their industry.
    std::map<std::pair<std::string, int>, std::ostringstream> plot_files;
    json masks = json::array();
    for (const auto& row : rows) {
        if (row.error) {
            csv::write_record(csv_out, {row.set->business_id, row.set->industry_label, "", "", "",
                                        "", "", "error"});
            score_rows.push_back({{"business_id", row.set->business_id},
                                  {"industry", row.set->industry_label},
                                  {"error", row.error_msg}});
            continue;
        }
        const ScoreReport& r = row.report;
        csv::write_record(csv_out,
                          {r.business_id, r.industry_label, std::to_string(r.cluster_id),
                           std::to_string(r.n_days), csv::format_double(r.vsp),
                           csv::format_double(r.isc), csv::format_double(r.wivs),
                           to_string(r.flag)});
        score_rows.push_back(report_to_json(r, false));
        if (config.export_masks) masks.push_back(report_to_json(r, true));

        auto& plot = plot_files[{r.industry_label, r.cluster_id}];
        if (plot.tellp() == 0) {
            csv::write_record(plot, {"business_id", "vsp", "isc", "wivs"});
        }
        csv::write_record(plot, {r.business_id, csv::format_double(r.vsp),
                                 csv::format_double(r.isc), csv::format_double(r.wivs)});
    }

    atomic_write(out_dir / "scores.csv", csv_out.str());
    json thresholds_json = json::object();
    for (const auto& [industry, value] : wivs_threshold) thresholds_json[industry] = value;
    atomic_write(out_dir / "scores.json",
                 json{{"reports", score_rows},
                      {"thresholds",
                       {{"vsp_anomalous", config.vsp_anomalous}, {"wivs_flag", thresholds_json}}}}
                         .dump(2) +
                     "\n");
    for (const auto& [key, stream] : plot_files) {
        const auto& [industry, cluster_id] = key;
        atomic_write(out_dir / "plots" /
                         (sanitize_for_filename(industry) + "_c" + std::to_string(cluster_id) +
                          ".csv"),
                     stream.str());
    }
    if (config.export_masks) {
        atomic_write(out_dir / "masks.json", masks.dump(2) + "\n");
    }

    json manifest{{"tool", tool_json("score")},
                  {"config", config_to_json(config)},
                  {"inputs",
                   {{"readings_csv", input_digest(config.readings_csv)},
                    {"prices_csv", input_digest(config.prices_csv)}}},
                  {"counts",
                   {{"scored", scored},
                    {"errors", errors},
                    {"attacks", attack_ids.size()},
                    {"wivs_thresholds", thresholds_json}}},
                  {"timing", {{"wall_ms", wall_ms_since(t0)}}}};
    atomic_write(out_dir / "score_manifest.json", manifest.dump(2) + "\n");
}

void cmd_redteam(const PipelineConfig& config, const std::string& models_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.attacks.empty()) {
        throw ConfigError("redteam: no attacks configured");
    }
    const fs::path out_dir = config.output_dir;
    const SeasonRange season = config.score_season.value_or(config.season);

    const auto models = load_models(models_dir);

    const bool any_rcsa = std::any_of(config.attacks.begin(), config.attacks.end(),
                                      [](const AttackSpec& a) {
                                          return a.kind == AttackSpec::Kind::rcsa;
                                      });
    IncentiveWeights weights;
    if (any_rcsa) {
        std::ifstream prices_in = open_input(config.prices_csv, "prices CSV");
        PriceParseResult prices = parse_price_csv(prices_in);
        for (const auto& w : prices.warnings) log_warn("prices: " + w);
        weights = incentive_weights(average_regions(prices.table, season), config.flat_price);
    }

    IngestOutcome outcome =
        ingest_readings(config.readings_csv, season, config.day_class, config.industries);

    json files = json::array();
    std::set<std::string> used_ids;
    for (const auto& spec : config.attacks) {
        std::string suffix;
        AttackFixture fixture;
        for (int ordinal = 2;; ++ordinal) {
            fixture = make_attack_fixture(spec, outcome.sets, models, weights, season,
                                          config.day_class, suffix);
            if (!used_ids.contains(fixture.business_id)) break;
            suffix = "." + std::to_string(ordinal);
        }
        used_ids.insert(fixture.business_id);
        const fs::path path = out_dir / "fixtures" /
                              ("attack_" + sanitize_for_filename(fixture.business_id) + ".csv");
        atomic_write(path, render_attack_csv({fixture}));
        files.push_back(path.string());
        log_info("wrote " + path.string());
    }

    json manifest{{"tool", tool_json("redteam")},
                  {"config", config_to_json(config)},
                  {"inputs", {{"readings_csv", input_digest(config.readings_csv)}}},
                  {"counts", {{"fixtures", files.size()}}},
                  {"fixtures", files},
                  {"timing", {{"wall_ms", wall_ms_since(t0)}}}};
    atomic_write(out_dir / "redteam_manifest.json", manifest.dump(2) + "\n");
}

void cmd_synth(const PipelineConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.synth.groups.empty()) {
        throw ConfigError("synth: no archetype groups configured");
    }
    const fs::path out_dir = config.output_dir;

    const SyntheticPopulation population = synthesize_population(config.synth);
    std::ostringstream readings;
    csv::write_record(readings, wide_header());
    for (const auto& profile : population.raw_profiles) {
        append_wide_row(readings, profile.business_id, config.synth.industry_label, profile.date,
                        profile.values);
    }
    atomic_write(out_dir / "synthetic_readings.csv", readings.str());

    json truth = json::object();
    for (const auto& [business, group] : population.archetype_of) truth[business] = group;
    json groups = json::array();
    for (const auto& g : config.synth.groups) {
        groups.push_back({{"archetype", g.archetype}, {"n_businesses", g.n_businesses}});
    }
    atomic_write(out_dir / "ground_truth.json",
                 json{{"groups", groups}, {"archetype_of", truth}}.dump(2) + "\n");

    const RegionalPriceTable prices = synthesize_prices(config.synth_prices);
    std::ostringstream price_csv;
    std::vector<std::string> header{"region", "date"};
    for (int t = 1; t <= kPeriodsPerDay; ++t) {
        char name[8];
        std::snprintf(name, sizeof(name), "p%02d", t);
        header.emplace_back(name);
    }
    csv::write_record(price_csv, header);
    for (const auto& [region, days] : prices.prices) {
        for (const auto& [date, values] : days) {
            std::vector<std::string> row{region, date.to_iso()};
            for (double v : values) row.push_back(csv::format_double(v));
            csv::write_record(price_csv, row);
        }
    }
    atomic_write(out_dir / "synthetic_prices.csv", price_csv.str());

    json manifest{{"tool", tool_json("synth")},
                  {"config", config_to_json(config)},
                  {"counts",
                   {{"businesses", population.sets.size()},
                    {"days", population.raw_profiles.size()},
                    {"price_regions", prices.prices.size()}}},
                  {"timing", {{"wall_ms", wall_ms_since(t0)}}}};
    atomic_write(out_dir / "synth_manifest.json", manifest.dump(2) + "\n");
}

}  // namespace loadshield
