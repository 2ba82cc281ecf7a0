#pragma once

#include <map>
#include <string>

namespace dtseg {

// Flat "key = value" text, one pair per line, '#' starts a comment.
// Unknown keys are rejected by the pipeline config parser so typos
// fail loudly.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap load_config_file(const std::string& path);

} // namespace dtseg
