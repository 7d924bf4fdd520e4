#include "toricount/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace toricount {

using nlohmann::json;

RawModel parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw ModelError(ModelFault::BadFile, std::string("model file is not valid JSON: ") + ex.what());
    }
    RawModel raw;
    try {
        raw.name = j.value("name", std::string("unnamed"));
        raw.n = j.at("n").get<int>();
        raw.r = j.at("r").get<int>();
        raw.rays = j.at("rays").get<std::vector<std::vector<long long>>>();
        raw.max_cones = j.at("max_cones").get<std::vector<std::vector<int>>>();
        raw.degrees = j.at("degrees").get<std::vector<int>>();
        for (const auto& t : j.at("polynomial")) {
            QTerm term;
            term.coeff = t.at("coeff").get<long long>();
            auto expo = t.at("expo").get<std::vector<int>>();
            term.expo.assign(expo.begin(), expo.end());
            raw.polynomial.push_back(std::move(term));
        }
        if (j.contains("basis_cone")) raw.basis_cone = j.at("basis_cone").get<int>();
    } catch (const json::exception& ex) {
        throw ModelError(ModelFault::BadFile, std::string("model field error: ") + ex.what());
    }
    return raw;
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    RawModel raw = parse_model_json(text);
    ToricModel model = ToricModel::validate(raw);
    QuasiForm form = QuasiForm::check_quasi_homogeneous(model, raw.polynomial);
    return {std::move(model), std::move(form), fnv1a_hex(text)};
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

}  // namespace toricount
