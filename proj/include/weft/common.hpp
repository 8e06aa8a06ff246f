#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace weft {

/// A non-fatal anomaly attached to a run. `line` is 0 when unknown.
struct Warning {
  std::string file;
  int line = 0;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
  friend auto operator<=>(const Warning&, const Warning&) = default;
};

/// Endpoints use GET..PATCH and ANY; remote calls use GET..PATCH and UNKNOWN.
enum class HttpMethod { GET, POST, PUT, DELETE, PATCH, ANY, UNKNOWN };

std::string_view to_string(HttpMethod method) noexcept;
std::optional<HttpMethod> parse_http_method(std::string_view text) noexcept;

inline constexpr std::string_view kWildcard = "{*}";

inline constexpr std::string_view kToolVersion =
#ifdef WEFT_VERSION_STRING
    WEFT_VERSION_STRING;
#else
    "0.0.0";
#endif

}  // namespace weft
