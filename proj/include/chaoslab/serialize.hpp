#pragma once

#include <string>

#include "chaoslab/atomic_measure.hpp"

namespace chaoslab {

// JSON form: {"kind": ..., "width": k, "atoms": [{"atom": ..., "weight": w}, ...]}
// Slot encodings: scalar -> number, symbol -> integer, velocity3 -> [x,y,z],
// phase -> {"position": [...], "velocity": [...]}; width-1 atoms are unwrapped.
// Serialization of the canonical form is deterministic, so equal measures
// produce byte-identical text.
std::string to_json_string(const AtomicMeasure& mu, int indent = -1);
AtomicMeasure atomic_measure_from_json_string(const std::string& text);

}  // namespace chaoslab
