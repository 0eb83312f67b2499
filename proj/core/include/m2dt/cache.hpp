#pragma once

// Content-addressed on-disk store for count vectors. Writes are atomic
// (tmp file + rename); payloads carry a checksum line that is verified on
// read, so a corrupted entry is detected rather than silently used.

#include "m2dt/fqcount.hpp"

#include <optional>
#include <string>

namespace m2dt {

std::string cache_key(const std::string& quiver_sig, const std::string& potential_sig,
                      const DimVector& n, uint32_t p, const std::string& sector,
                      uint32_t value_scale);

std::optional<CountVector> cache_get(const std::string& dir, const std::string& key, uint32_t p);
void cache_put(const std::string& dir, const std::string& key, const CountVector& v);

} // namespace m2dt
