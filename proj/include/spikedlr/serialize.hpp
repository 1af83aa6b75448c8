#pragma once

#include <string>

#include "spikedlr/ensembles.hpp"
#include "spikedlr/inference.hpp"

namespace spikedlr {

inline constexpr const char* kVersion = "spikedlr 0.1.0";

namespace serialize {

// {case, p, n1, n2, theta, seed, values:[...]}
std::string eigensample_to_json(const ensembles::EigenSample& s);
ensembles::EigenSample eigensample_from_json(const std::string& text);

// single column with a header comment line
std::string eigensample_to_csv(const ensembles::EigenSample& s);

// MCSummary with the resolved config and library version embedded
std::string mc_summary_to_json(const inference::MCSummary& s);
std::string mc_replicates_to_csv(const inference::MCSummary& s);

// mc subcommand config; unknown keys rejected
inference::MCConfig mc_config_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace serialize
}  // namespace spikedlr
