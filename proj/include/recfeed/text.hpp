#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace recfeed::text {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
// Alternate basis used for the sign hash of the hashed embedding.
constexpr std::uint64_t kFnvOffsetAlt = 0x84222325cbf29ce4ULL;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffset);
std::string hex64(std::uint64_t value);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Bytes >= 0x80 count as word characters so UTF-8 words stay intact.
bool is_word_byte(unsigned char c);
std::vector<std::string> tokenize(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Shortest round-trip representation; integral values print without a fraction.
std::string format_number(double value);

} // namespace recfeed::text
