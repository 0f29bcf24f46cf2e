#include "ccr/dataset_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace ccr {

static_assert(std::endian::native == std::endian::little,
              "dataset container assumes a little-endian host");

namespace {

constexpr char kMagic[] = "CCRD1\n";

void write_block(std::ofstream& out, const double* data, std::streamsize count,
                 const char* section) {
    out.write(reinterpret_cast<const char*>(data),
              count * static_cast<std::streamsize>(sizeof(double)));
    if (!out) {
        throw IoError(std::string("failed writing section '") + section + "'");
    }
}

void read_block(std::ifstream& in, double* data, std::streamsize count, const char* section) {
    in.read(reinterpret_cast<char*>(data),
            count * static_cast<std::streamsize>(sizeof(double)));
    if (in.gcount() != count * static_cast<std::streamsize>(sizeof(double))) {
        throw FormatError(std::string("dataset file truncated in section '") + section + "'");
    }
}

Eigen::Index require_index(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        throw FormatError(std::string("dataset header missing integer field '") + key + "'");
    }
    return j.at(key).get<Eigen::Index>();
}

}  // namespace

nlohmann::json dgp_config_to_json(const DgpConfig& c) {
    return nlohmann::json{
        {"n", c.n},
        {"regime", dim_regime_name(c.regime)},
        {"k", c.k},
        {"ell", c.ell},
        {"alpha", c.alpha},
        {"delta", c.delta},
        {"rho", c.rho},
        {"sigma_eps", c.sigma_eps},
        {"c1", c.c1},
        {"gamma_scale", c.gamma_scale},
        {"base_seed", c.base_seed},
    };
}

DgpConfig dgp_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("dgp config must be a JSON object");
    }
    static const std::set<std::string> known = {
        "n",   "regime",    "k",  "ell",         "alpha",     "delta",
        "rho", "sigma_eps", "c1", "gamma_scale", "base_seed",
    };
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown key 'dgp." + key + "'");
        }
    }
    DgpConfig c;
    try {
        if (j.contains("n")) c.n = j.at("n").get<Eigen::Index>();
        if (j.contains("regime")) c.regime = dim_regime_from_name(j.at("regime").get<std::string>());
        if (j.contains("k")) c.k = j.at("k").get<Eigen::Index>();
        if (j.contains("ell")) c.ell = j.at("ell").get<Eigen::Index>();
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("delta")) c.delta = j.at("delta").get<double>();
        if (j.contains("rho")) c.rho = j.at("rho").get<double>();
        if (j.contains("sigma_eps")) c.sigma_eps = j.at("sigma_eps").get<double>();
        if (j.contains("c1")) c.c1 = j.at("c1").get<double>();
        if (j.contains("gamma_scale")) c.gamma_scale = j.at("gamma_scale").get<double>();
        if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid dgp config value: ") + e.what());
    }
    c.validate();
    return c;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }

    nlohmann::json header{
        {"n", dataset.n()},
        {"p", dataset.p()},
        {"p_w", dataset.p_w()},
        {"has_truth", dataset.truth.has_value()},
    };
    if (dataset.config) {
        header["config"] = dgp_config_to_json(*dataset.config);
    }

    out.write(kMagic, 6);
    const std::string header_line = header.dump() + "\n";
    out.write(header_line.data(), static_cast<std::streamsize>(header_line.size()));
    if (!out) {
        throw IoError("failed writing dataset header to '" + path + "'");
    }

    write_block(out, dataset.y.data(), dataset.y.size(), "y");
    write_block(out, dataset.z_x.data(), dataset.z_x.size(), "z_x");
    write_block(out, dataset.z_w.data(), dataset.z_w.size(), "z_w");
    if (dataset.truth) {
        write_block(out, dataset.truth->x.data(), dataset.truth->x.size(), "x");
        write_block(out, dataset.truth->w.data(), dataset.truth->w.size(), "w");
        write_block(out, dataset.truth->beta.data(), dataset.truth->beta.size(), "beta");
        write_block(out, dataset.truth->eps.data(), dataset.truth->eps.size(), "eps");
    }
    out.flush();
    if (!out) {
        throw IoError("failed flushing dataset file '" + path + "'");
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }

    char magic[6];
    in.read(magic, 6);
    if (in.gcount() != 6 || std::string(magic, 6) != kMagic) {
        throw FormatError("'" + path + "' is not a CCRD1 dataset (bad magic)");
    }

    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw FormatError("dataset file truncated in section 'header'");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("dataset header is not valid JSON: ") + e.what());
    }

    const Eigen::Index n = require_index(header, "n");
    const Eigen::Index p = require_index(header, "p");
    const Eigen::Index p_w = require_index(header, "p_w");
    if (n < 1 || p < 1 || p_w < 1) {
        throw FormatError("dataset header declares empty dimensions");
    }
    if (!header.contains("has_truth") || !header.at("has_truth").is_boolean()) {
        throw FormatError("dataset header missing boolean field 'has_truth'");
    }
    const bool has_truth = header.at("has_truth").get<bool>();

    Dataset ds;
    if (header.contains("config")) {
        ds.config = dgp_config_from_json(header.at("config"));
    }

    ds.y.resize(n);
    ds.z_x.resize(n, p);
    ds.z_w.resize(n, p_w);
    read_block(in, ds.y.data(), ds.y.size(), "y");
    read_block(in, ds.z_x.data(), ds.z_x.size(), "z_x");
    read_block(in, ds.z_w.data(), ds.z_w.size(), "z_w");

    if (has_truth) {
        GroundTruth truth;
        truth.x.resize(n, p);
        truth.w.resize(n, p_w);
        truth.beta.resize(p);
        truth.eps.resize(n);
        read_block(in, truth.x.data(), truth.x.size(), "x");
        read_block(in, truth.w.data(), truth.w.size(), "w");
        read_block(in, truth.beta.data(), truth.beta.size(), "beta");
        read_block(in, truth.eps.data(), truth.eps.size(), "eps");
        truth.h_x = ds.z_x - truth.x;
        truth.h_w = ds.z_w - truth.w;
        ds.truth = std::move(truth);
    }

    ds.validate();
    return ds;
}

}  // namespace ccr
