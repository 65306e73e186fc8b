#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sparsecast {

struct FetchResponse {
    int status = 0;
    std::string body;
};

/// Transport injection point: tests pass canned payloads, the CLI wires an
/// HTTP client.
using FetchTransport = std::function<FetchResponse(const std::string& url)>;

struct FetchResult {
    std::vector<std::string> files_written;
    std::vector<std::string> series_fetched;
};

/// Pull monthly series from a FRED-style observations endpoint and write them
/// in the panel format plus a metadata skeleton (release lags default to 1,
/// meant to be hand-edited). Purely a convenience layer; never exercised
/// against the network by the test suite.
FetchResult fetch_remote(const std::vector<std::string>& series_ids, const std::string& api_key,
                         const std::string& out_dir, const FetchTransport& transport);

/// Default transport backed by cpp-httplib against api.stlouisfed.org.
FetchTransport http_transport();

}  // namespace sparsecast
