#pragma once

#include <stdexcept>
#include <string>

namespace brickgram {

enum class Errc {
  parse_error,          // malformed input file, bad schema field
  empty_input,          // zero points / zero records
  argument_error,       // caller passed an out-of-range value
  degenerate_geometry,  // plane fit impossible (collinear / too few points)
  degenerate_cluster,   // rectangle fit collapsed to zero width or height
  no_bricks_found,      // clustering produced nothing usable
  insufficient_data,    // too few measurements to fit distributions
  spec_too_small,       // wall envelope cannot hold a single brick
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace brickgram
