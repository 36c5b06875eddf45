#pragma once

// Versioned JSON snapshots of the self-organizing networks. Doubles are
// written in shortest round-trip form, so save -> load is bit-exact.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "affnego/gamma_gwr.hpp"
#include "affnego/gwr.hpp"

namespace affnego {

using Json = nlohmann::json;

inline constexpr int kSnapshotVersion = 1;

Json to_json(const GwrParams& p);
GwrParams gwr_params_from_json(const Json& j);

Json to_json(const GwrNetwork& net);
GwrNetwork gwr_from_json(const Json& j);

Json to_json(const GammaGwrNetwork& net);
GammaGwrNetwork gamma_gwr_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace affnego
