#pragma once

#include <cstdint>
#include <vector>

#include "cfpp/degrees.hpp"
#include "cfpp/error.hpp"
#include "doctest.h"

namespace cfpp::test {

inline DegreeSequence seq_of(std::vector<std::int64_t> raw) { return load_degree_sequence(raw); }

}  // namespace cfpp::test

#define CHECK_ERROR_CODE(expr, expected)                 \
  do {                                                   \
    bool thrown_ = false;                                \
    try {                                                \
      (void)(expr);                                      \
    } catch (const ::cfpp::Error& e_) {                  \
      thrown_ = true;                                    \
      CHECK(e_.code() == (expected));                    \
    }                                                    \
    CHECK_MESSAGE(thrown_, "expected " #expected);       \
  } while (0)
