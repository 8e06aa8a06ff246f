#include "weft/common.hpp"

#include <array>

namespace weft {
namespace {
constexpr std::array<std::string_view, 7> kMethodNames = {"GET", "POST", "PUT", "DELETE", "PATCH", "ANY", "UNKNOWN"};
}

std::string_view to_string(HttpMethod method) noexcept { return kMethodNames[static_cast<std::size_t>(method)]; }

std::optional<HttpMethod> parse_http_method(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i)
    if (kMethodNames[i] == text) return static_cast<HttpMethod>(i);
  return std::nullopt;
}

}  // namespace weft
