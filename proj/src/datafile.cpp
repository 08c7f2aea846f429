#include "dhitchin/datafile.hpp"

#include <cmath>
#include <fstream>

namespace dhitchin {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json grid_to_json(const RealGrid& grid) {
    json rows = json::array();
    for (int j = 0; j < grid.rows(); ++j) {
        json row = json::array();
        for (int k = 0; k < grid.cols(); ++k) row.push_back(grid(j, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

long expect_positive_int(const json& doc, const char* key) {
    std::string path = std::string("/") + key;
    if (!doc.contains(key)) throw DataFileError(path, "missing key");
    const auto& v = doc.at(key);
    if (!v.is_number_integer()) throw DataFileError(path, "expected an integer");
    long n = v.get<long>();
    if (n < 1) throw DataFileError(path, "expected a positive integer");
    return n;
}

double expect_positive_real(const json& doc, const char* key) {
    std::string path = std::string("/") + key;
    if (!doc.contains(key)) throw DataFileError(path, "missing key");
    const auto& v = doc.at(key);
    if (!v.is_number()) throw DataFileError(path, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw DataFileError(path, "value is not finite");
    if (!(x > 0.0)) throw DataFileError(path, "expected a positive value");
    return x;
}

RealGrid expect_grid(const json& doc, const char* key, long rows, long cols) {
    std::string base = std::string("/") + key;
    if (!doc.contains(key)) throw DataFileError(base, "missing key");
    const auto& arr = doc.at(key);
    if (!arr.is_array()) throw DataFileError(base, "expected a 2-D array");
    if (static_cast<long>(arr.size()) != rows)
        throw DataFileError(base, "expected " + std::to_string(rows) + " rows, found " +
                                      std::to_string(arr.size()));
    RealGrid grid(rows, cols);
    for (long j = 0; j < rows; ++j) {
        std::string rpath = base + "/" + std::to_string(j);
        const auto& row = arr.at(j);
        if (!row.is_array()) throw DataFileError(rpath, "expected an array row");
        if (static_cast<long>(row.size()) != cols)
            throw DataFileError(rpath, "expected " + std::to_string(cols) + " columns, found " +
                                           std::to_string(row.size()));
        for (long k = 0; k < cols; ++k) {
            std::string epath = rpath + "/" + std::to_string(k);
            const auto& v = row.at(k);
            if (!v.is_number()) throw DataFileError(epath, "expected a number");
            double x = v.get<double>();
            if (!std::isfinite(x)) throw DataFileError(epath, "value is not finite");
            if (!(x > 0.0)) throw DataFileError(epath, "expected a positive value");
            grid(j, k) = x;
        }
    }
    return grid;
}

}  // namespace

ordered_json to_datafile_json(const InstantonData& data, const ordered_json& metadata) {
    data.validate();
    ordered_json doc;
    doc["n1"] = data.n1;
    doc["n2"] = data.n2;
    doc["p"] = 1;
    doc["F"] = grid_to_json(data.F);
    doc["G"] = grid_to_json(data.G);
    doc["a0"] = data.a0;
    doc["b0"] = data.b0;
    doc["metadata"] = metadata.is_null() ? ordered_json::object() : metadata;
    return doc;
}

InstantonData datafile_from_json(const json& doc) {
    if (!doc.is_object()) throw DataFileError("/", "expected a JSON object");
    InstantonData data;
    data.n1 = static_cast<int>(expect_positive_int(doc, "n1"));
    data.n2 = static_cast<int>(expect_positive_int(doc, "n2"));
    long p = expect_positive_int(doc, "p");
    if (p != 1) throw DataFileError("/p", "instanton data files require p = 1");
    data.F = expect_grid(doc, "F", data.n2, data.n1 - 1);
    data.G = expect_grid(doc, "G", data.n2 - 1, data.n1);
    data.a0 = expect_positive_real(doc, "a0");
    data.b0 = expect_positive_real(doc, "b0");
    data.validate();
    return data;
}

void write_datafile(const std::string& path, const InstantonData& data,
                    const ordered_json& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_datafile: cannot open " + path);
    out << to_datafile_json(data, metadata).dump(2) << "\n";
    if (!out) throw std::runtime_error("write_datafile: write failed for " + path);
}

InstantonData read_datafile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_datafile: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataFileError("/", std::string("invalid JSON: ") + e.what());
    }
    return datafile_from_json(doc);
}

}  // namespace dhitchin
