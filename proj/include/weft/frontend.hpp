#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weft/common.hpp"
#include "weft/laast.hpp"

namespace weft {

enum class Convention { SpringLike, JaxRsLike, LaastPassthrough };

std::string_view to_string(Convention convention) noexcept;
std::optional<Convention> parse_convention(std::string_view text) noexcept;

/// Client-side idioms the frontend recognizes as remote calls or event
/// publications. Configuration appends to the defaults.
struct ClientIdioms {
  struct Publisher {
    std::string receiver;
    std::string method;
    // Argument index holding the topic. -1 selects the routing-key rule:
    // argument 1 when the call has three or more arguments, else argument 0.
    int topic_arg = 0;
  };
  struct Listener {
    std::string annotation;
    std::string topic_key;
  };

  std::vector<std::string> rest_template_receivers{"restTemplate"};
  std::vector<std::string> web_client_receivers{"webClient"};
  std::vector<std::string> jaxrs_client_receivers{"client"};
  std::vector<Publisher> publishers{{"kafkaTemplate", "send", 0},
                                    {"rabbitTemplate", "convertAndSend", -1}};
  std::vector<Listener> listeners{{"KafkaListener", "topics"}, {"RabbitListener", "queues"}};
};

struct SourceTree {
  std::string service_name;
  std::filesystem::path root_dir;
  std::vector<std::string> include_globs;  // empty selects the convention default
  Convention convention = Convention::SpringLike;
};

std::vector<std::string> default_globs(Convention convention);

struct SkippedFile {
  std::string file;
  std::string reason;
  friend bool operator==(const SkippedFile&, const SkippedFile&) = default;
};

struct ExtractionReport {
  std::size_t files_scanned = 0;
  std::vector<SkippedFile> files_skipped;
  std::size_t nodes_emitted = 0;
  std::vector<Warning> warnings;

  friend bool operator==(const ExtractionReport&, const ExtractionReport&) = default;
};

struct Extraction {
  LaastNode root;
  ExtractionReport report;
};

/// Walks the tree in sorted path order and emits one CompilationUnit child
/// per scanned file under a synthetic root named after the service.
/// Unreadable or non-UTF-8 files become skips; nothing aborts the run.
Extraction extract(const SourceTree& tree, const ClientIdioms& idioms = {}, unsigned jobs = 1);

/// Heuristic extraction of a single Java source file, exposed for tests.
/// `relative_path` becomes the span file of every emitted node.
LaastNode extract_java_source(std::string_view source, const std::string& relative_path,
                              const ClientIdioms& idioms, std::vector<Warning>& warnings);

using StringTable = std::map<std::string, std::string, std::less<>>;

struct RecognizedAnnotation {
  std::string name;
  Attributes arguments;
  friend bool operator==(const RecognizedAnnotation&, const RecognizedAnnotation&) = default;
};

struct AnnotationScan {
  std::vector<RecognizedAnnotation> annotations;
  std::vector<std::string> warnings;
};

/// Recognizes every `@Name`, `@Name("v")` and `@Name(key = v, ...)` in the
/// text. Array values `{"a","b"}` are joined with `|`; qualified enum
/// constants reduce to their last segment. Identifiers found in `constants`
/// are substituted.
AnnotationScan recognize_annotation(std::string_view text, const StringTable* constants = nullptr);

struct CallScan {
  std::optional<LaastNode> call;
  std::vector<std::string> warnings;
};

/// Recognizes the first remote-call idiom in a statement. The Call node
/// carries `call_kind=remote`, `http_method`, `url_template`, `arg_count`.
/// Non-literal URL fragments become `{*}`; `known` resolves identifiers
/// (class constants, local string variables) to URL fragments.
CallScan recognize_remote_call(std::string_view statement, const ClientIdioms& idioms = {},
                               const StringTable* known = nullptr);

/// Recognizes the first event publication in a statement
/// (`call_kind=event`, `direction=Publish`, `topic`, `arg_count`).
CallScan recognize_event_publish(std::string_view statement, const ClientIdioms& idioms = {},
                                 const StringTable* known = nullptr);

/// `**` spans directories, `*` and `?` stay within one path segment.
bool glob_match(std::string_view pattern, std::string_view path) noexcept;

}  // namespace weft
