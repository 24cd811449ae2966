#include "otdro/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "otdro/error.hpp"
#include "otdro/text.hpp"
#include "otdro/time.hpp"

namespace otdro::cli {

namespace {

using nlohmann::json;

double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(field, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::string string(const json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigError(field, "expected a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], field + "[" + std::to_string(k) + "]"));
    return out;
}

std::filesystem::path input_path(const json& v, const std::string& field, const std::filesystem::path& base) {
    std::filesystem::path p = string(v, field);
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) throw DataError("config field '" + field + "': file not found: " + p.string());
    return p;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError(prefix + key, "unknown key");
    }
}

SyntheticSource parse_synthetic(const json& obj) {
    if (!obj.is_object()) throw ConfigError("synthetic", "expected an object");
    reject_unknown(obj, {"seed", "preset", "hours", "start"}, "synthetic.");
    if (!obj.contains("seed")) throw ConfigError("synthetic.seed", "required; synthetic data needs an explicit seed");
    SyntheticSource src;
    if (!obj["seed"].is_number_unsigned()) throw ConfigError("synthetic.seed", "expected a non-negative integer");
    src.seed = obj["seed"].get<std::uint64_t>();
    if (obj.contains("preset")) src.preset = string(obj["preset"], "synthetic.preset");
    try {
        src.config = synthetic_preset(src.preset);
    } catch (const DataError& e) {
        throw ConfigError("synthetic.preset", e.what());
    }
    if (obj.contains("hours")) src.config.hours = count(obj["hours"], "synthetic.hours");
    if (obj.contains("start")) {
        try {
            src.config.start = parse_timestamp(string(obj["start"], "synthetic.start"));
        } catch (const DataError& e) {
            throw ConfigError("synthetic.start", e.what());
        }
    }
    try {
        check(src.config);
    } catch (const DataError& e) {
        throw ConfigError("synthetic", e.what());
    }
    return src;
}

}  // namespace

SyntheticConfig synthetic_preset(const std::string& name) {
    if (name == "default") return SyntheticConfig{};
    if (name == "spike_heavy") return SyntheticConfig::spike_heavy();
    throw DataError("unknown synthetic preset '" + name + "' (expected default or spike_heavy)");
}

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");
    reject_unknown(doc,
                   {"market", "forecast", "ensemble_size", "output_dir", "synthetic", "alpha", "beta", "epsilons",
                    "margin", "max_samples", "nomination_upper", "backend", "jobs", "thresholds",
                    "transport_exponent"},
                   "");

    RunConfig cfg;
    auto& bt = cfg.backtest;
    if (doc.contains("alpha")) bt.reference.alpha = number(doc["alpha"], "alpha");
    if (doc.contains("beta")) bt.reference.beta = number(doc["beta"], "beta");
    if (doc.contains("epsilons")) {
        bt.epsilons = number_list(doc["epsilons"], "epsilons");
        std::sort(bt.epsilons.begin(), bt.epsilons.end());
        if (std::adjacent_find(bt.epsilons.begin(), bt.epsilons.end()) != bt.epsilons.end())
            throw ConfigError("epsilons", "contains duplicate radii");
    }
    if (doc.contains("margin")) bt.margin = number(doc["margin"], "margin");
    if (doc.contains("max_samples") && !doc["max_samples"].is_null())
        bt.reference.max_samples = count(doc["max_samples"], "max_samples");
    if (doc.contains("nomination_upper") && !doc["nomination_upper"].is_null())
        bt.nomination_upper = number(doc["nomination_upper"], "nomination_upper");
    if (doc.contains("backend")) {
        const std::string b = string(doc["backend"], "backend");
        if (b == "structured")
            bt.backend = Backend::structured;
        else if (b == "simplex")
            bt.backend = Backend::simplex;
        else
            throw ConfigError("backend", "expected \"structured\" or \"simplex\", got \"" + b + "\"");
    }
    bt.jobs = doc.contains("jobs") ? count(doc["jobs"], "jobs") : 0;
    if (doc.contains("thresholds")) bt.tail_thresholds = number_list(doc["thresholds"], "thresholds");
    if (doc.contains("transport_exponent")) bt.cost.p = number(doc["transport_exponent"], "transport_exponent");
    bt.check();

    if (doc.contains("market")) cfg.market = input_path(doc["market"], "market", base_dir);
    if (doc.contains("forecast")) cfg.forecast = input_path(doc["forecast"], "forecast", base_dir);
    if (doc.contains("ensemble_size")) {
        cfg.ensemble_size = count(doc["ensemble_size"], "ensemble_size");
        if (*cfg.ensemble_size == 0) throw ConfigError("ensemble_size", "must be >= 1");
    }
    if (doc.contains("output_dir")) {
        cfg.output_dir = string(doc["output_dir"], "output_dir");
        if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
    } else {
        cfg.output_dir = base_dir / cfg.output_dir;
    }
    if (doc.contains("synthetic")) cfg.synthetic = parse_synthetic(doc["synthetic"]);
    if (cfg.synthetic && (cfg.market || cfg.forecast))
        throw ConfigError("synthetic", "cannot be combined with market/forecast files");
    if (cfg.market.has_value() != cfg.forecast.has_value())
        throw ConfigError(cfg.market ? "forecast" : "market", "market and forecast files must be given together");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return parse_config(text.str(), base);
}

}  // namespace otdro::cli
