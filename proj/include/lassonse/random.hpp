#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lassonse {

/// Independent generator for the stream identified by (seed, keys...).
/// The same key tuple always yields the same sequence, so work can be
/// split across threads without changing results.
std::mt19937_64 substream(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> keys);

}  // namespace lassonse
