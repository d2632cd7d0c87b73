#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bstac/trainer.hpp"

namespace bstac {

inline constexpr int kModelFormatVersion = 1;

// Versioned line-oriented text. Reals use shortest round-trip decimals, so
// read_model(write_model(s)) reproduces every serialized field exactly.
// Wall-clock timings and claimed-row lists are not part of the format.
std::string write_model(const EnsembleStack& stack);
EnsembleStack read_model(std::string_view text);

void save_model(const EnsembleStack& stack, const std::filesystem::path& path);
EnsembleStack load_model(const std::filesystem::path& path);

}  // namespace bstac
