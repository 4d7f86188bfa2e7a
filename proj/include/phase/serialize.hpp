// serialize.hpp
// JSON round trips for the value types the CLI reads and writes. Complex
// entries are stored as [re, im] pairs in row-major order; composite states
// carry their convention tag explicitly.

#pragma once

#include <json.hpp>

#include "phase/states.hpp"

namespace phase {

nlohmann::json json_of(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

// Density matrices are revalidated on load (Hermiticity, trace, positivity),
// so a hand-edited document cannot smuggle in an invalid state.
nlohmann::json json_of(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);

nlohmann::json json_of(const CompositeState& s);
CompositeState composite_from_json(const nlohmann::json& j);

AncillaConvention convention_from_name(const std::string& name);

} // namespace phase
