#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "regverify/configuration.hpp"

namespace regverify {

enum class Answer { Positive, Negative, Unknown };

const char* answer_name(Answer a);

struct Stats {
  std::uint64_t explored_nodes = 0;
  std::uint64_t witness_steps = 0;
  double millis = 0.0;
};

struct Verdict {
  Answer answer = Answer::Unknown;
  std::string algorithm;
  std::optional<Execution> witness;
  Stats stats;
  std::string detail;
};

}  // namespace regverify
