#include "sparsecast/fetch.hpp"

#include <filesystem>

#include <json.hpp>
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#endif

#include "sparsecast/errors.hpp"
#include "sparsecast/panel_io.hpp"

namespace sparsecast {

namespace {

TimeSeries parse_observations(const std::string& series_id, const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const std::exception& e) {
        throw HttpError("fetch: bad payload for " + series_id + ": " + e.what(), 200);
    }
    if (!doc.contains("observations"))
        throw HttpError("fetch: payload for " + series_id + " lacks observations", 200);

    TimeSeries series;
    series.id = series_id;
    series.frequency = Frequency::Monthly;
    series.release_lag_months = 1;  // skeleton default, hand-edit afterwards
    series.sa_flag = true;

    // Leading missing markers shift the start; an interior one truncates the
    // series (values are stored contiguously).
    bool started = false;
    for (const auto& obs : doc["observations"]) {
        const std::string date = obs.at("date").get<std::string>();
        const std::string value = obs.at("value").get<std::string>();
        if (value == ".") {
            if (started) break;
            continue;
        }
        const Month m = Month::parse(date.substr(0, 7));
        if (!started) {
            series.start = m;
            started = true;
        } else if (m != series.start + series.size()) {
            break;  // dated gap
        }
        series.values.push_back(std::stod(value));
    }
    return series;
}

}  // namespace

FetchResult fetch_remote(const std::vector<std::string>& series_ids, const std::string& api_key,
                         const std::string& out_dir, const FetchTransport& transport) {
    FetchResult result;
    if (series_ids.empty()) return result;

    Dataset dataset;
    for (const auto& id : series_ids) {
        const std::string url = "https://api.stlouisfed.org/fred/series/observations?series_id=" +
                                id + "&file_type=json&api_key=" + api_key;
        const FetchResponse response = transport(url);
        if (response.status == 404) throw UnknownSeriesError(id);
        if (response.status == 429) throw RateLimitedError("fetch: rate limited on " + id);
        if (response.status != 200)
            throw HttpError("fetch: status " + std::to_string(response.status) + " for " + id,
                            response.status);
        dataset.monthly.push_back(parse_observations(id, response.body));
        result.series_fetched.push_back(id);
    }

    std::filesystem::create_directories(out_dir);
    const std::string panel = out_dir + "/panel.csv";
    const std::string metadata = out_dir + "/metadata.csv";
    write_panel(dataset, panel, metadata);
    result.files_written = {panel, metadata};
    return result;
}

FetchTransport http_transport() {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    return [](const std::string& url) {
        const auto host_start = url.find("://") + 3;
        const auto path_start = url.find('/', host_start);
        httplib::SSLClient client(url.substr(host_start, path_start - host_start));
        auto response = client.Get(url.substr(path_start));
        if (!response) throw HttpError("fetch: connection failed", 0);
        return FetchResponse{response->status, response->body};
    };
#else
    return [](const std::string&) -> FetchResponse {
        throw HttpError("fetch: this build lacks TLS support; supply data files instead", 0);
    };
#endif
}

}  // namespace sparsecast
