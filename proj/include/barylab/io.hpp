#pragma once

// JSON encodings: atoms, strings, codomain values, tabulated-function files
// and property reports.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "barylab/core.hpp"
#include "barylab/report.hpp"

namespace barylab {

using json = nlohmann::json;

/// Numbers, labels and points (arrays of numbers). The label "epsilon" is reserved.
json atom_to_json(const Atom& a);
Atom atom_from_json(const json& j);

/// "epsilon" or the atom.
json covalue_to_json(const CoValue& v);
CoValue covalue_from_json(const json& j);

/// Arrays of atoms; the empty string is [].
json str_to_json(std::span<const Atom> s);
Str str_from_json(const json& j);

json domain_to_json(const DomainDesc& d);

/// {"domain", "codomain" (list or "same_plus_epsilon"), "max_arity", "default", "table": [{"in", "out"}]}.
/// Only tabulated functions can be written.
json table_to_json(const VarFn& f);
/// Validates totality and codomain membership; throws Error(format) otherwise.
VarFn table_from_json(const json& j);

VarFn load_table_file(const std::filesystem::path& path);
void save_table_file(const VarFn& f, const std::filesystem::path& path);

json witness_to_json(const Witness& w);

/// Report schema. Timing is left out unless requested so identical runs give
/// identical bytes.
json report_to_json(const PropertyReport& r, bool with_timing = false);

}  // namespace barylab
