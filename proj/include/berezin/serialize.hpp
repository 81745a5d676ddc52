#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "berezin/berezin.hpp"

namespace berezin {

/// Matrix bundle: dimension plus complex matrices as row-major (re, im)
/// pairs.  Matrices above `dense_limit` rows are stored as (row, col, re, im)
/// entries instead.
nlohmann::json matrix_to_json(const CMatrix& m, int dense_limit = 128);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json irrep_to_json(const Irrep& rep);
Irrep irrep_from_json(const nlohmann::json& j);

nlohmann::json operator_to_json(const BerezinOperator& op);
BerezinOperator operator_from_json(const nlohmann::json& j);

void save_irrep(const Irrep& rep, const std::string& path);
Irrep load_irrep(const std::string& path);

std::string irrep_cache_key(std::string_view series, int rank, const Weight& lambda, int k);
std::string irrep_cache_key(const Irrep& rep);

}  // namespace berezin
