#pragma once

#include <string>

#include "fedtrip/param_vector.hpp"

namespace fedtrip {

// On-disk model snapshot: a text layout header followed by the raw values
// as little-endian IEEE-754 doubles.
//
//   FTCKPT 1
//   segments <n>
//   <name> <dim0> [dim1 ...]     (n lines)
//   data <value-count>
//   <value-count * 8 bytes>
void save_checkpoint(const ParamVector& params, const std::string& path);
ParamVector load_checkpoint(const std::string& path);

}  // namespace fedtrip
