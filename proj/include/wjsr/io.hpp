#pragma once

#include <string>
#include <vector>

#include "wjsr/dwell.hpp"
#include "wjsr/graph.hpp"
#include "wjsr/ipa.hpp"
#include "wjsr/mixed.hpp"
#include "wjsr/weighted.hpp"

namespace wjsr {

// JSON readers. All throw std::invalid_argument naming the offending field
// on schema violations; structural validation (shapes, connectivity) is
// delegated to the target type's validate(). Mode numbers and vertex
// indices in JSON are 0-based for graph edges ("from"/"to") and 1-based
// wherever they mirror word strings such as "1112" (signal runs, witness
// mode lists, switching-law events).
WeightedSystem weighted_from_json(const std::string& text);
MixedSystem mixed_from_json(const std::string& text);
GraphSystem graph_from_json(const std::string& text);
DwellSystem dwell_from_json(const std::string& text);
SwitchingLaw law_from_json(const std::string& text);

// JSON writers; round-trip with the readers.
std::string weighted_to_json(const WeightedSystem& sys);
std::string mixed_to_json(const MixedSystem& ms);
std::string graph_to_json(const GraphSystem& gs);
std::string dwell_to_json(const DwellSystem& ds);

// Report writers. Deterministic output (sorted keys, shortest round-trip
// number encoding); non-finite numeric fields are omitted.
std::string ipa_report_json(const IpaResult& res);
std::string bounds_report_json(const BoundsReport& rep);
std::string graph_report_json(const GraphSystem& gs, const GraphIpaResult& res);
std::string dwell_reports_json(const std::vector<DwellReport>& reps);

// Witness word as a 1-based string: "112" while every mode fits one digit,
// space-separated numbers otherwise.
std::string mode_word_string(const std::vector<int>& word);

const char* status_name(IpaStatus s);

// Header t,x1..xd,active; active rendered as 0/1; 17 significant digits.
std::string trajectory_csv(const std::vector<TrajectorySample>& samples);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace wjsr
