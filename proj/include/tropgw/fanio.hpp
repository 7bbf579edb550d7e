#ifndef TROPGW_FANIO_HPP
#define TROPGW_FANIO_HPP

// JSON serialization of weighted complexes and piecewise affine functions.
// Rationals travel as strings "p/q" (or "p"); round trips are exact.

#include "tropgw/complex.hpp"

#include <nlohmann/json.hpp>

namespace tropgw {

nlohmann::json complex_to_json(const WeightedComplex& x);
WeightedComplex complex_from_json(const nlohmann::json& j);

nlohmann::json plfunction_to_json(const PLFunction& f);
PLFunction plfunction_from_json(const nlohmann::json& j);

} // namespace tropgw

#endif
