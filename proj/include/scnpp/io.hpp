#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scnpp/errors.hpp"
#include "scnpp/problems.hpp"
#include "scnpp/schemes.hpp"

namespace scnpp {

namespace io {

using nlohmann::json;

inline Vector vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError({where + ": expected an array of numbers"});
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ValidationError({where + ": expected an array of numbers"});
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

inline LinearOp matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ValidationError({where + ": expected {rows, cols, data}"});
    const auto rows = j["rows"].get<Eigen::Index>();
    const auto cols = j["cols"].get<Eigen::Index>();
    const auto& data = j["data"];
    if (rows <= 0 || cols <= 0)
        throw ValidationError({where + ": rows and cols must be positive"});
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw ValidationError({where + ": data must hold rows*cols entries, row-major"});
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = data[static_cast<size_t>(i * cols + k)].get<double>();
    return LinearOp(std::move(m));
}

inline SetDescriptor set_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type"))
        throw ValidationError({where + ": expected a set descriptor with a type"});
    const std::string type = j["type"].get<std::string>();
    if (type == "box")
        return BoxSet{vector_from_json(j.at("lo"), where + ".lo"),
                      vector_from_json(j.at("hi"), where + ".hi")};
    if (type == "ball")
        return BallSet{vector_from_json(j.at("center"), where + ".center"),
                       j.at("radius").get<double>()};
    if (type == "halfspace")
        return HalfspaceSet{vector_from_json(j.at("a"), where + ".a"), j.at("b").get<double>()};
    if (type == "affine")
        return AffineSet{matrix_from_json(j.at("E"), where + ".E"),
                         vector_from_json(j.at("d"), where + ".d")};
    throw ValidationError({where + ": unknown set type '" + type + "'"});
}

inline MonotoneMap mapping_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind"))
        throw ValidationError({where + ": expected a mapping descriptor with a kind"});
    const std::string kind = j["kind"].get<std::string>();
    MonotoneMap m;
    if (kind == "zero") {
        m.kind = ZeroMap{};
    } else if (kind == "normal_cone_box") {
        m.kind = NormalConeMap{BoxSet{vector_from_json(j.at("lo"), where + ".lo"),
                                      vector_from_json(j.at("hi"), where + ".hi")}};
    } else if (kind == "normal_cone_ball") {
        m.kind = NormalConeMap{BallSet{vector_from_json(j.at("center"), where + ".center"),
                                       j.at("radius").get<double>()}};
    } else if (kind == "normal_cone_halfspace") {
        m.kind = NormalConeMap{
            HalfspaceSet{vector_from_json(j.at("a"), where + ".a"), j.at("b").get<double>()}};
    } else if (kind == "normal_cone_affine") {
        m.kind = NormalConeMap{AffineSet{matrix_from_json(j.at("E"), where + ".E"),
                                         vector_from_json(j.at("d"), where + ".d")}};
    } else if (kind == "subdiff_l1") {
        m.kind = SubdiffL1Map{j.at("weight").get<double>()};
    } else if (kind == "affine_monotone") {
        m.kind = AffineMonotoneMap{matrix_from_json(j.at("G"), where + ".G"),
                                   vector_from_json(j.at("c"), where + ".c")};
    } else if (kind == "affine_vi") {
        m.kind = AffineVIMap{matrix_from_json(j.at("G"), where + ".G"),
                             vector_from_json(j.at("c"), where + ".c"),
                             set_from_json(j.at("set"), where + ".set")};
    } else {
        throw ValidationError({where + ": unknown mapping kind '" + kind + "'"});
    }
    m.odd = j.value("odd", false);
    return m;
}

/// Parses an instance document; structural invariants are checked separately
/// by validate().
inline ScnppInstance instance_from_json(const json& j) {
    ScnppInstance inst;
    if (!j.is_object()) throw ValidationError({"instance: expected a JSON object"});
    if (!j.contains("space") || !j["space"].contains("n1"))
        throw ValidationError({"instance: missing space.n1"});
    inst.n1 = j["space"]["n1"].get<Eigen::Index>();
    if (j.contains("mappings")) {
        const auto& maps = j["mappings"];
        if (maps.contains("b"))
            for (size_t i = 0; i < maps["b"].size(); ++i)
                inst.b_maps.push_back(
                    mapping_from_json(maps["b"][i], "mappings.b[" + std::to_string(i) + "]"));
        if (maps.contains("f"))
            for (size_t i = 0; i < maps["f"].size(); ++i)
                inst.f_maps.push_back(
                    mapping_from_json(maps["f"][i], "mappings.f[" + std::to_string(i) + "]"));
    }
    if (j.contains("operators") && j["operators"].contains("a"))
        for (size_t i = 0; i < j["operators"]["a"].size(); ++i)
            inst.a_ops.push_back(matrix_from_json(j["operators"]["a"][i],
                                                  "operators.a[" + std::to_string(i) + "]"));
    if (j.contains("certified_solution") && !j["certified_solution"].is_null())
        inst.certified_solution = vector_from_json(j["certified_solution"], "certified_solution");
    if (j.contains("certified_empty") && !j["certified_empty"].is_null())
        inst.certified_empty = j["certified_empty"].get<bool>();
    return inst;
}

inline ScnppInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"cannot open instance file: " + path});
    json j = json::parse(in);  // parse_error carries the byte offset
    return instance_from_json(j);
}

/// 17 significant digits: round-trips doubles exactly and keeps traces
/// byte-identical across runs.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Converged: return "Converged";
        case RunStatus::MaxIterReached: return "MaxIterReached";
        case RunStatus::Breakdown: return "Breakdown";
    }
    return "Unknown";
}

/// Delimiter-separated trace: one row per recorded iteration, then a summary
/// block with status, iterations_used and the final point.
inline void write_trace(std::ostream& out, const RunTrace& trace, bool include_iterates) {
    out << "k,primal_residual,image_residual,step_norm";
    if (include_iterates && !trace.iterates_recorded.empty()) {
        const Eigen::Index n = trace.iterates_recorded.front().second.size();
        for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
    }
    out << "\n";
    for (size_t row = 0; row < trace.residual_history.size(); ++row) {
        const auto& r = trace.residual_history[row];
        out << r.k << "," << fmt17(r.primal_residual) << "," << fmt17(r.image_residual) << ","
            << fmt17(r.step_norm);
        if (include_iterates) {
            const Vector& x = trace.iterates_recorded[row].second;
            for (Eigen::Index i = 0; i < x.size(); ++i) out << "," << fmt17(x[i]);
        }
        out << "\n";
    }
    out << "# status," << status_name(trace.status);
    if (trace.status == RunStatus::Breakdown) out << "," << trace.breakdown_reason;
    out << "\n";
    out << "# iterations_used," << trace.iterations_used << "\n";
    out << "# final_point";
    for (Eigen::Index i = 0; i < trace.final_point.size(); ++i)
        out << "," << fmt17(trace.final_point[i]);
    out << "\n";
}

}  // namespace io

}  // namespace scnpp
