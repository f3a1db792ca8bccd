// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/modelclient.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "httplib.h"
#include "tsvlm/error.hpp"
#include "tsvlm/parsefmt.hpp"
#include "tsvlm/qagen.hpp"

namespace tsvlm {

namespace {

using Json = nlohmann::ordered_json;

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path without trailing slash
};

Url split_url(const std::string& base) {
    const auto scheme = base.find("://");
    if (scheme == std::string::npos) throw InvalidArgument(fmt::format("base_url '{}' lacks a scheme", base));
    const auto slash = base.find('/', scheme + 3);
    Url u;
    u.origin = base.substr(0, slash);
    if (slash != std::string::npos) u.prefix = base.substr(slash);
    while (!u.prefix.empty() && u.prefix.back() == '/') u.prefix.pop_back();
    return u;
}

bool transient(int status) { return status == 429 || (status >= 500 && status <= 599); }

std::string extract_text(const std::string& body) {
    Json j;
    try {
        j = Json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(fmt::format("response body is not JSON: {}", e.what()));
    }
    try {
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
        if (content.is_array()) {
            std::string text;
            for (const auto& part : content)
                if (part.value("type", "") == "text") text += part.at("text").get<std::string>();
            return text;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(fmt::format("unexpected response shape: {}", e.what()));
    }
    throw ProtocolError("message content is neither a string nor a list of parts");
}

long elapsed_ms(std::chrono::steady_clock::time_point since) {
    return static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - since).count());
}

std::string window_id(const DatasetSeries& s, int offset) { return fmt::format("{}:{}", s.id, offset); }

} // namespace

void EndpointConfig::validate() const {
    split_url(base_url);
    if (model_name.empty()) throw InvalidArgument("model_name must not be empty");
    if (max_retries < 0) throw InvalidArgument("max_retries must be >= 0");
    if (max_in_flight < 1) throw InvalidArgument("max_in_flight must be >= 1");
    if (backoff_base_ms < 0) throw InvalidArgument("backoff_base_ms must be >= 0");
    if (max_output_tokens < 1) throw InvalidArgument("max_output_tokens must be positive");
    if (timeout_ms < 1) throw InvalidArgument("timeout_ms must be positive");
    if (!(failure_tolerance >= 0.0 && failure_tolerance <= 1.0))
        throw InvalidArgument("failure_tolerance must lie in [0, 1]");
}

void to_json(Json& j, const EndpointConfig& v) {
    j = {{"base_url", v.base_url},
         {"model_name", v.model_name},
         {"api_key_env", v.api_key_env},
         {"temperature", v.temperature},
         {"max_output_tokens", v.max_output_tokens},
         {"max_retries", v.max_retries},
         {"backoff_base_ms", v.backoff_base_ms},
         {"max_in_flight", v.max_in_flight},
         {"timeout_ms", v.timeout_ms},
         {"failure_tolerance", v.failure_tolerance}};
}

void merge_json(const Json& j, EndpointConfig& v) {
    if (!j.is_object()) throw InvalidArgument("endpoint config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "base_url") v.base_url = value.get<std::string>();
            else if (key == "model_name") v.model_name = value.get<std::string>();
            else if (key == "api_key_env") v.api_key_env = value.get<std::string>();
            else if (key == "temperature") v.temperature = value.get<double>();
            else if (key == "max_output_tokens") v.max_output_tokens = value.get<int>();
            else if (key == "max_retries") v.max_retries = value.get<int>();
            else if (key == "backoff_base_ms") v.backoff_base_ms = value.get<int>();
            else if (key == "max_in_flight") v.max_in_flight = value.get<int>();
            else if (key == "timeout_ms") v.timeout_ms = value.get<int>();
            else if (key == "failure_tolerance") v.failure_tolerance = value.get<double>();
            else throw InvalidArgument(fmt::format("unknown key '{}' in endpoint config", key));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(fmt::format("endpoint config.{}: {}", key, e.what()));
        }
    }
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

Json build_chat_request(const ImageArtifact& image, std::string_view question, const EndpointConfig& cfg) {
    constexpr std::string_view kPlaceholder = "<image>";
    if (question.substr(0, kPlaceholder.size()) == kPlaceholder) question.remove_prefix(kPlaceholder.size());
    Json text = {{"type", "text"}, {"text", std::string(question)}};
    Json img = {{"type", "image_url"},
                {"image_url", {{"url", "data:image/png;base64," + base64_encode(image.png)}}}};
    Json msg = {{"role", "user"}, {"content", Json::array({text, img})}};
    return {{"model", cfg.model_name},
            {"temperature", cfg.temperature},
            {"max_tokens", cfg.max_output_tokens},
            {"messages", Json::array({msg})}};
}

QueryResult query_vlm_logged(const ImageArtifact& image, std::string_view question, const EndpointConfig& cfg) {
    cfg.validate();
    std::string key;
    if (!cfg.api_key_env.empty()) {
        const char* v = std::getenv(cfg.api_key_env.c_str());
        if (!v || !*v) throw CredentialError(fmt::format("environment variable {} is not set", cfg.api_key_env));
        key = v;
    }
    const Url url = split_url(cfg.base_url);
    const std::string path = url.prefix + "/chat/completions";
    const std::string body = build_chat_request(image, question, cfg).dump();

    httplib::Client client(url.origin);
    const auto secs = cfg.timeout_ms / 1000;
    const auto usecs = (cfg.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

    QueryResult result;
    for (int attempt = 0;; ++attempt) {
        const auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post(path, headers, body, "application/json");
        QueryAttempt a;
        a.latency_ms = elapsed_ms(t0);
        if (res) {
            a.status = res->status;
        } else {
            a.error = httplib::to_string(res.error());
        }
        result.attempts.push_back(a);

        if (res && res->status >= 200 && res->status < 300) {
            result.text = extract_text(res->body);
            return result;
        }
        if (res && (res->status == 401 || res->status == 403))
            throw CredentialError(fmt::format("endpoint rejected credentials (HTTP {})", res->status));
        if (res && !transient(res->status))
            throw ProtocolError(fmt::format("endpoint answered HTTP {}: {}", res->status, res->body.substr(0, 200)));
        if (attempt >= cfg.max_retries)
            throw TransportError(fmt::format("giving up after {} attempts; last: {}", result.attempts.size(),
                                             res ? fmt::format("HTTP {}", res->status) : a.error));
        const long wait = static_cast<long>(cfg.backoff_base_ms) << std::min(attempt, 20);
        std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    }
}

std::string query_vlm(const ImageArtifact& image, std::string_view question, const EndpointConfig& cfg) {
    return query_vlm_logged(image, question, cfg).text;
}

HttpBackend::HttpBackend(EndpointConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::string HttpBackend::respond(const WindowTask&, const ImageArtifact& image, std::string_view question) {
    return query_vlm(image, question, cfg_);
}

std::string OracleBackend::respond(const WindowTask& task, const ImageArtifact&, std::string_view) {
    return "<think>Reading the plot.</think> Final Answer: " + to_boxed(task.truth);
}

std::string EmptyBackend::respond(const WindowTask&, const ImageArtifact&, std::string_view) {
    return "<think>The curve looks regular.</think> Final Answer: boxed{[]}";
}

std::string ReplayBackend::respond(const WindowTask& task, const ImageArtifact&, std::string_view) {
    const auto it = responses_.find(task.window_id);
    if (it == responses_.end()) throw ProtocolError(fmt::format("no recorded response for window {}", task.window_id));
    return it->second;
}

std::map<std::string, std::string> read_response_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open response log", path.string());
    std::map<std::string, std::string> out;
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = Json::parse(line);
            out[j.at("window_id").get<std::string>()] = j.at("response").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw IoError(fmt::format("line {} is not a response record ({})", n, e.what()), path.string());
        }
    }
    return out;
}

std::vector<WindowTask> plan_windows(const Dataset& dataset, const WindowPlan& plan) {
    plan.validate();
    const int canonical = plan.canonical_length();
    const double factor = plan.rescale_factor();
    std::vector<WindowTask> tasks;
    for (std::size_t si = 0; si < dataset.series.size(); ++si) {
        const auto& s = dataset.series[si];
        if (static_cast<int>(s.values.size()) < plan.window) continue;
        for (auto& w : slice_windows(s.values, s.labels, plan)) {
            WindowTask t;
            t.window_id = window_id(s, w.offset);
            t.series = static_cast<int>(si);
            t.offset = w.offset;
            t.length = plan.window;
            std::vector<Segment> local;
            for (int i = 0; i < t.length;) {
                if (w.labels.empty() || !w.labels[i]) {
                    ++i;
                    continue;
                }
                int j = i;
                while (j + 1 < t.length && w.labels[j + 1]) ++j;
                local.push_back({i, j});
                i = j + 1;
            }
            t.truth = map_intervals(local, factor, MapDirection::ToCanonical, canonical - 1);
            t.values = std::move(w.values);
            tasks.push_back(std::move(t));
        }
    }
    return tasks;
}

EvalReport score_responses(const Dataset& dataset, const WindowPlan& plan,
                           const std::map<std::string, std::string>& responses) {
    plan.validate();
    const int canonical = plan.canonical_length();
    const double factor = plan.rescale_factor();
    std::vector<ScoredSeries> scored;
    std::vector<std::size_t> scored_index;
    int n_windows = 0, n_failed = 0, n_unparsed = 0;
    for (std::size_t si = 0; si < dataset.series.size(); ++si) {
        const auto& s = dataset.series[si];
        const int n = static_cast<int>(s.values.size());
        if (n < plan.window) continue;
        std::vector<WindowPrediction> preds;
        for (int off : window_offsets(n, plan)) {
            ++n_windows;
            const auto it = responses.find(window_id(s, off));
            if (it == responses.end()) {
                ++n_failed;
                continue;
            }
            const auto parsed = try_parse_boxed_intervals(it->second, canonical);
            if (!parsed) {
                ++n_unparsed;
                continue;
            }
            preds.push_back({off, plan.window,
                             map_intervals(parsed->intervals, factor, MapDirection::ToOriginal, plan.window - 1)});
        }
        scored.push_back({vote_scores(preds, n), s.labels.empty() ? std::vector<int>(n, 0) : s.labels});
        scored_index.push_back(si);
    }
    EvalReport report = point_adjusted_best_f1(scored);
    report.n_windows = n_windows;
    report.n_failed = n_failed;
    report.n_unparsed = n_unparsed;
    for (std::size_t k = 0; k < scored.size(); ++k) {
        const auto& typed = dataset.series[scored_index[k]].typed;
        if (!typed.empty()) add_per_kind(report, scored[k].scores, typed);
    }
    return report;
}

EvalReport eval_dataset(const Dataset& dataset, const WindowPlan& plan, const RenderSpec& render_spec,
                        VlmBackend& backend, const EvalOptions& options) {
    if (dataset.series.empty()) throw InvalidArgument("dataset has no series");
    if (options.max_in_flight < 1) throw InvalidArgument("max_in_flight must be >= 1");
    RenderSpec rs = render_spec;
    rs.canonical_length = plan.canonical_length();
    if (backend.needs_image()) rs.validate();
    const auto tasks = plan_windows(dataset, plan);
    const std::string question(kDetectPrompt);

    std::ofstream log;
    if (options.response_log) {
        log.open(*options.response_log, std::ios::trunc);
        if (!log) throw IoError("cannot write response log", options.response_log->string());
    }
    std::mutex mu;
    std::map<std::string, std::string> responses;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    int failed = 0;
    std::exception_ptr fatal;
    const double allowed = options.failure_tolerance * static_cast<double>(tasks.size());

    const auto worker = [&] {
        for (;;) {
            if (abort.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const auto& t = tasks[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                ImageArtifact image;
                if (backend.needs_image()) image = render(t.values, rs);
                std::string text = backend.respond(t, image, question);
                const long ms = elapsed_ms(t0);
                std::lock_guard lock(mu);
                if (log.is_open()) {
                    Json j = {{"window_id", t.window_id}, {"offset", t.offset}, {"response", text}, {"latency_ms", ms}};
                    log << j.dump() << '\n' << std::flush;
                }
                responses.emplace(t.window_id, std::move(text));
            } catch (const CredentialError&) {
                std::lock_guard lock(mu);
                if (!fatal) fatal = std::current_exception();
                abort.store(true);
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                ++failed;
                fmt::print(stderr, "window {} failed: {}\n", t.window_id, e.what());
                if (static_cast<double>(failed) > allowed) abort.store(true);
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(options.max_in_flight, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (log.is_open()) log.close();

    if (fatal) std::rethrow_exception(fatal);
    if (static_cast<double>(failed) > allowed)
        throw PartialResultsError(fmt::format("{} of {} windows failed (tolerance {:.2g}%); {} responses kept", failed,
                                              tasks.size(), options.failure_tolerance * 100.0, responses.size()),
                                  failed, static_cast<int>(responses.size()), static_cast<int>(tasks.size()));
    return score_responses(dataset, plan, responses);
}

} // namespace tsvlm
