#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hexcover/instance.hpp"

namespace hexcover {

inline constexpr int kInstanceFormatVersion = 1;

// One-line canonical JSON document with stable field order.
std::string serialize_instance(const AoiInstance& inst);
// Throws DataError on version mismatch or schema violation.
AoiInstance deserialize_instance(std::string_view doc);

// Newline-delimited corpus files.
void write_corpus(std::ostream& out, const std::vector<AoiInstance>& corpus);
std::vector<AoiInstance> read_corpus_file(const std::string& path);
// Parses the whole buffer at once.
std::vector<AoiInstance> parse_corpus(std::string_view text);
// Parses one line at a time, calling visit for each instance; returns count.
std::size_t stream_corpus(std::istream& in, const std::function<void(AoiInstance&&)>& visit);

// 64-bit FNV-1a, used for output checksums in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace hexcover
