#ifndef PRPO_LABEL_HPP
#define PRPO_LABEL_HPP

#include <string>
#include <string_view>

#include "prpo/errors.hpp"

namespace prpo {

enum class Label { Real, Fake };

inline std::string to_string(Label l) { return l == Label::Real ? "real" : "fake"; }

inline Label parse_label(std::string_view s) {
  if (s == "real" || s == "Real" || s == "REAL") return Label::Real;
  if (s == "fake" || s == "Fake" || s == "FAKE") return Label::Fake;
  throw SchemaViolation("unknown label '" + std::string(s) + "' (expected real or fake)");
}

}  // namespace prpo

#endif
