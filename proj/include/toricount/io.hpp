#pragma once

#include <string>

#include "toricount/model.hpp"
#include "toricount/qform.hpp"

namespace toricount {

inline const char* tool_version() { return "0.1.0"; }

struct LoadedModel {
    ToricModel model;
    QuasiForm form;
    std::string hash;   // FNV-1a of the model file bytes, hex
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

RawModel parse_model_json(const std::string& text);
LoadedModel load_model_file(const std::string& path);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace toricount
