#include "ccr/run_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "ccr/dataset_io.hpp"

namespace ccr {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& scope) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown key '" + (scope.empty() ? key : scope + "." + key) + "'");
        }
    }
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, const std::string& scope) {
    if (!arr.is_array()) throw ConfigError("'" + scope + "' must be an array of numbers");
    Eigen::VectorXd v(arr.size());
    Eigen::Index i = 0;
    for (const auto& item : arr) {
        if (!item.is_number()) throw ConfigError("'" + scope + "' must contain only numbers");
        v(i++) = item.get<double>();
    }
    return v;
}

}  // namespace

EstimatorSpec estimator_spec_from_json(const nlohmann::json& j, const DgpConfig& dgp) {
    EstimatorSpec spec;
    spec.k = dgp.k;
    spec.ell = dgp.ell;
    if (j.is_string()) {
        spec.kind = estimator_kind_from_name(j.get<std::string>());
        spec.validate();
        return spec;
    }
    if (!j.is_object()) {
        throw ConfigError("estimator entries must be names or objects");
    }
    reject_unknown(j,
                   {"kind", "k", "ell", "pinv_tol", "label", "left_weights", "right_weights"},
                   "estimators[]");
    if (!j.contains("kind")) throw ConfigError("estimator object requires 'kind'");
    spec.kind = estimator_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("k")) spec.k = j.at("k").get<Eigen::Index>();
    if (j.contains("ell")) spec.ell = j.at("ell").get<Eigen::Index>();
    if (j.contains("pinv_tol")) spec.pinv_tol = j.at("pinv_tol").get<double>();
    if (j.contains("label")) spec.label = j.at("label").get<std::string>();
    if (j.contains("left_weights")) {
        if (spec.kind != EstimatorKind::CustomCcr) {
            throw ConfigError("'left_weights' is only valid for kind 'custom'");
        }
        spec.weights.left = WeightSpec::Left::Custom;
        spec.weights.left_values = vector_from_json(j.at("left_weights"), "left_weights");
    }
    if (j.contains("right_weights")) {
        if (spec.kind != EstimatorKind::CustomCcr) {
            throw ConfigError("'right_weights' is only valid for kind 'custom'");
        }
        spec.weights.right = WeightSpec::Right::Custom;
        spec.weights.right_values = vector_from_json(j.at("right_weights"), "right_weights");
    }
    spec.validate();
    return spec;
}

nlohmann::json estimator_spec_to_json(const EstimatorSpec& spec) {
    nlohmann::json j{
        {"kind", estimator_kind_name(spec.kind)},
        {"k", spec.k},
        {"ell", spec.ell},
        {"pinv_tol", spec.pinv_tol},
    };
    if (!spec.label.empty()) j["label"] = spec.label;
    if (spec.kind == EstimatorKind::CustomCcr) {
        if (spec.weights.left == WeightSpec::Left::Custom) {
            j["left_weights"] = std::vector<double>(
                spec.weights.left_values.data(),
                spec.weights.left_values.data() + spec.weights.left_values.size());
        }
        if (spec.weights.right == WeightSpec::Right::Custom) {
            j["right_weights"] = std::vector<double>(
                spec.weights.right_values.data(),
                spec.weights.right_values.data() + spec.weights.right_values.size());
        }
    }
    return j;
}

RunConfig default_run_config() {
    RunConfig config;
    config.plan.dgp = config.dgp;
    config.plan.n_grid = {config.dgp.n};
    config.plan.delta_grid = {config.dgp.delta};
    config.plan.regimes = {config.dgp.regime};
    for (const auto kind : {EstimatorKind::Naive2Sls, EstimatorKind::Pca2Sls,
                            EstimatorKind::Whiten2Sls, EstimatorKind::Cca2Sls}) {
        EstimatorSpec spec;
        spec.kind = kind;
        spec.k = config.dgp.k;
        spec.ell = config.dgp.ell;
        config.plan.estimators.push_back(spec);
    }
    config.plan.reps = 50;
    config.plan.base_seed = config.dgp.base_seed;
    return config;
}

void RunConfig::validate() const {
    dgp.validate();
    plan.validate();
    if (out_dir.empty()) throw ConfigError("out_dir must be nonempty");
}

RunConfig run_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, {"dgp", "seed", "plan", "out_dir"}, "");

    RunConfig config = default_run_config();
    if (doc.contains("dgp")) {
        config.dgp = dgp_config_from_json(doc.at("dgp"));
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_integer() && !doc.at("seed").is_number_unsigned()) {
            throw ConfigError("'seed' must be an integer");
        }
        config.dgp.base_seed = doc.at("seed").get<std::uint64_t>();
    }

    config.plan = SimulationPlan{};
    config.plan.dgp = config.dgp;
    config.plan.base_seed = config.dgp.base_seed;
    config.plan.n_grid = {config.dgp.n};
    config.plan.delta_grid = {config.dgp.delta};
    config.plan.regimes = {config.dgp.regime};

    bool estimators_given = false;
    if (doc.contains("plan")) {
        const nlohmann::json& p = doc.at("plan");
        if (!p.is_object()) throw ConfigError("'plan' must be a JSON object");
        reject_unknown(p,
                       {"n_grid", "delta_grid", "regimes", "estimators", "reps", "workers",
                        "record_timing"},
                       "plan");
        try {
            if (p.contains("n_grid")) {
                config.plan.n_grid.clear();
                for (const auto& v : p.at("n_grid")) {
                    config.plan.n_grid.push_back(v.get<Eigen::Index>());
                }
            }
            if (p.contains("delta_grid")) {
                config.plan.delta_grid.clear();
                for (const auto& v : p.at("delta_grid")) {
                    config.plan.delta_grid.push_back(v.get<double>());
                }
            }
            if (p.contains("regimes")) {
                config.plan.regimes.clear();
                for (const auto& v : p.at("regimes")) {
                    config.plan.regimes.push_back(dim_regime_from_name(v.get<std::string>()));
                }
            }
            if (p.contains("estimators")) {
                estimators_given = true;
                config.plan.estimators.clear();
                for (const auto& v : p.at("estimators")) {
                    config.plan.estimators.push_back(estimator_spec_from_json(v, config.dgp));
                }
            }
            if (p.contains("reps")) config.plan.reps = p.at("reps").get<int>();
            if (p.contains("workers")) config.plan.workers = p.at("workers").get<int>();
            if (p.contains("record_timing")) {
                config.plan.record_timing = p.at("record_timing").get<bool>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("invalid plan value: ") + e.what());
        }
    }
    if (!estimators_given) {
        for (const auto kind : {EstimatorKind::Naive2Sls, EstimatorKind::Pca2Sls,
                                EstimatorKind::Whiten2Sls, EstimatorKind::Cca2Sls}) {
            EstimatorSpec spec;
            spec.kind = kind;
            spec.k = config.dgp.k;
            spec.ell = config.dgp.ell;
            config.plan.estimators.push_back(spec);
        }
    }

    if (doc.contains("out_dir")) {
        if (!doc.at("out_dir").is_string()) throw ConfigError("'out_dir' must be a string");
        config.out_dir = doc.at("out_dir").get<std::string>();
    }

    config.validate();
    return config;
}

nlohmann::json run_config_to_json(const RunConfig& config) {
    nlohmann::json plan;
    plan["n_grid"] = config.plan.n_grid;
    plan["delta_grid"] = config.plan.delta_grid;
    plan["regimes"] = nlohmann::json::array();
    for (const auto r : config.plan.regimes) {
        plan["regimes"].push_back(dim_regime_name(r));
    }
    plan["estimators"] = nlohmann::json::array();
    for (const auto& est : config.plan.estimators) {
        plan["estimators"].push_back(estimator_spec_to_json(est));
    }
    plan["reps"] = config.plan.reps;
    plan["workers"] = config.plan.workers;
    plan["record_timing"] = config.plan.record_timing;

    return nlohmann::json{
        {"dgp", dgp_config_to_json(config.dgp)},
        {"seed", config.dgp.base_seed},
        {"plan", plan},
        {"out_dir", config.out_dir},
    };
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return run_config_from_json(doc);
}

}  // namespace ccr
