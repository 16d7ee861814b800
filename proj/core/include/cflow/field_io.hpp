#pragma once

#include <string>

#include "cflow/map_field.hpp"

namespace cflow {

/// Field container: 8-byte magic "CFLOWFLD", a little-endian uint64 length
/// prefix, a UTF-8 JSON header {dims, lengths, rank, target_dim, components},
/// then the raw little-endian 64-bit floats, node-major with components
/// fastest. Write/read round trips are bit-exact.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

/// Map serialization: the displacement goes through the field container and
/// a JSON sidecar `<path>.meta.json` carries {linear_part, target}.
void write_map(const std::string& path, const MapField& u);
MapField read_map(const std::string& path);

} // namespace cflow
