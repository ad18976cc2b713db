#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mg2v {

using NodeId = int32_t;
using TypeId = int32_t;
using RelId = int32_t;

constexpr NodeId kNoNode = -1;
constexpr TypeId kNoType = -1;
constexpr RelId kNoRel = -1;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse failures carry a 1-based source position.
struct ParseError : Error {
  int line;
  int column;
  ParseError(int line_, int column_, const std::string& what_)
      : Error(std::to_string(line_) + ":" + std::to_string(column_) + ": " + what_),
        line(line_),
        column(column_) {}
};

}  // namespace mg2v
