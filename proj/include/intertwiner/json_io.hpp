#pragma once

#include <string>

#include <json.hpp>

#include "intertwiner/dynamics.hpp"
#include "intertwiner/intertwine.hpp"
#include "intertwiner/spectral.hpp"
#include "intertwiner/types.hpp"

namespace intertwiner {

// Matrix schema: {"n": int, "data": [[[re,im], ... n], ... n rows]}, row-major.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

// Vector schema: {"n": int, "data": [[re,im], ... n]}.
nlohmann::json vector_to_json(const CVector& v);
CVector vector_from_json(const nlohmann::json& j);

nlohmann::json etaset_to_json(const IntertwinerSet& set);
IntertwinerSet etaset_from_json(const nlohmann::json& j);

nlohmann::json relation_to_json(const Relation& rel);
Relation relation_from_json(const nlohmann::json& j);

nlohmann::json symmetry_to_json(const SymmetryDescriptor& sym);

// Segments schema: {"segments": [{"h": <matrix>, "tau": real}, ...]}.
FloquetDrive drive_from_json(const nlohmann::json& j);
nlohmann::json drive_to_json(const FloquetDrive& drive);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace intertwiner
