#pragma once
// CSV / JSON output and the flat key=value config format.

#include <map>
#include <string>

#include "quenchroll/corrector.hpp"

namespace quenchroll {

// CSV columns x, re(u), im(u); JSON sidecar <path>.json records the box and
// transform convention.
void write_field_csv(const std::string& path, const SpectralField& f, double eps, double tau);

void write_json(const std::string& path, const std::string& body);

// Flat `key = value` file, '#' comments. Unknown keys are an error.
QuenchConfig load_config(const std::string& path);
void apply_config_line(QuenchConfig& cfg, const std::string& key, const std::string& value);
std::string config_to_string(const QuenchConfig& cfg);

} // namespace quenchroll
