#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "potts/coupling.hpp"
#include "potts/meanfield.hpp"
#include "potts/mple.hpp"
#include "potts/model.hpp"

namespace potts {

/// One configuration per line, space-separated colors 1 .. q.
void write_configurations(std::ostream& out, const std::vector<Configuration>& xs);

/// Reads every non-blank line; colors must lie in 1 .. q.
std::vector<Configuration> read_configurations(std::istream& in, int q);

// JSON views. Non-finite numbers become null.
nlohmann::json to_json(const ExistenceReport& report);
nlohmann::json to_json(const MplFit& fit);
nlohmann::json to_json(const MeanFieldSolution& sol, bool include_runs = false);
nlohmann::json to_json(const CouplingStats& s);

}  // namespace potts
