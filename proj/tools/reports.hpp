#pragma once

#include <json.hpp>

#include "implorenz/conditions.hpp"
#include "implorenz/entropy.hpp"
#include "implorenz/measures.hpp"
#include "implorenz/sweep.hpp"

namespace implorenz::cli {

inline constexpr const char* kConditionsSchema = "implorenz.conditions/1";
inline constexpr const char* kEntropySchema = "implorenz.entropy/1";
inline constexpr const char* kBasinsSchema = "implorenz.basins/1";
inline constexpr const char* kSweepSchema = "implorenz.sweep/1";
inline constexpr const char* kMeasureSchema = "implorenz.measure/1";
inline constexpr const char* kSimulateSchema = "implorenz.simulate/1";
inline constexpr const char* kSectionMapSchema = "implorenz.section-map/1";

/// JSON has no NaN or infinity; those become null and read back as NaN.
nlohmann::json number(double x);
double number_from(const nlohmann::json& j);

nlohmann::json to_json(const ConditionReport& r);
ConditionReport condition_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EntropyReport& r);
nlohmann::json to_json(const BasinReport& r);
nlohmann::json to_json(const SweepResult& r);

}  // namespace implorenz::cli
