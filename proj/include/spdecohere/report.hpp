#pragma once

#include <string>

#include <json.hpp>

#include "spdecohere/config.hpp"
#include "spdecohere/decoherence.hpp"

namespace spdecohere {

// 17-significant-digit, locale-independent rendering (CSV cells, golden files).
std::string format_double(double v);

nlohmann::ordered_json config_json(const ExperimentConfig& config);
nlohmann::ordered_json quadrature_json(const SpectralIntegral& q);
nlohmann::ordered_json breakdown_json(const DecoherenceBreakdown& b);

// Full JSON report for one computed scenario, including validity flags and
// the standing reference notes.
nlohmann::ordered_json compute_report(const ExperimentConfig& config,
                                      const DecoherenceBreakdown& b);

nlohmann::ordered_json error_report(const std::string& type, const std::string& message);

// Write to the path, or to stdout when the path is empty or "-".
void write_text(const std::string& path, const std::string& body);

} // namespace spdecohere
