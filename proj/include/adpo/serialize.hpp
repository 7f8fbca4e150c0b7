#pragma once

#include <iosfwd>
#include <string>

#include "adpo/policy.hpp"

namespace adpo {

// Text serialization of policy parameters: a shape header followed by one
// whitespace-separated row per table row, printed with 17 significant digits
// so round-trips are bit-exact.
void save_params(const PolicyParams& params, std::ostream& out);
void save_params_file(const PolicyParams& params, const std::string& path);

PolicyParams load_params(std::istream& in);
PolicyParams load_params_file(const std::string& path);

}  // namespace adpo
