// The 17-tag universal part-of-speech set.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cxg {

enum class Upos : std::uint8_t {
  ADJ,
  ADP,
  ADV,
  AUX,
  CCONJ,
  DET,
  INTJ,
  NOUN,
  NUM,
  PART,
  PRON,
  PROPN,
  PUNCT,
  SCONJ,
  SYM,
  VERB,
  X,
};

inline constexpr int kUposCount = 17;

inline constexpr std::array<std::string_view, kUposCount> kUposNames = {
    "ADJ",  "ADP",  "ADV",   "AUX",   "CCONJ", "DET",  "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",  "VERB", "X"};

inline std::string_view to_string(Upos t) {
  return kUposNames[static_cast<std::size_t>(t)];
}

inline std::optional<Upos> upos_from_string(std::string_view s) {
  for (int i = 0; i < kUposCount; ++i) {
    if (kUposNames[i] == s) return static_cast<Upos>(i);
  }
  return std::nullopt;
}

// Content-word categories; only these carry a semantic domain.
inline bool is_open_class(Upos t) {
  switch (t) {
    case Upos::NOUN:
    case Upos::PROPN:
    case Upos::VERB:
    case Upos::ADJ:
    case Upos::ADV:
      return true;
    default:
      return false;
  }
}

}  // namespace cxg
