#ifndef DHITCHIN_DATAFILE_HPP
#define DHITCHIN_DATAFILE_HPP

#include <string>

#include <json.hpp>

#include "dhitchin/lattice.hpp"

namespace dhitchin {

/// Malformed data file; `json_path` points at the offending element.
struct DataFileError : std::runtime_error {
    std::string json_path;
    DataFileError(const std::string& path, const std::string& what)
        : std::runtime_error(what + " (at " + path + ")"), json_path(path) {}
};

/// Canonical JSON document: keys n1, n2, p, F, G, a0, b0, metadata.
nlohmann::ordered_json to_datafile_json(const InstantonData& data,
                                        const nlohmann::ordered_json& metadata = {});

InstantonData datafile_from_json(const nlohmann::json& doc);

void write_datafile(const std::string& path, const InstantonData& data,
                    const nlohmann::ordered_json& metadata = {});

InstantonData read_datafile(const std::string& path);

}  // namespace dhitchin

#endif
