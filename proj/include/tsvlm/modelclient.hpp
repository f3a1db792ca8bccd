// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsvlm/evalkit.hpp"
#include "tsvlm/render.hpp"

namespace tsvlm {

struct EndpointConfig {
    // Scheme, host, optional port and optional path prefix, e.g.
    // "https://api.example.com/v1". Requests go to <prefix>/chat/completions.
    std::string base_url = "http://127.0.0.1:8000/v1";
    std::string model_name = "default";
    // Name of the environment variable holding the bearer token; empty means
    // the endpoint takes no credentials.
    std::string api_key_env = "TSVLM_API_KEY";
    double temperature = 0.0;
    int max_output_tokens = 1024;
    int max_retries = 4;
    int backoff_base_ms = 500;
    int max_in_flight = 4;
    int timeout_ms = 120000;
    // Fraction of failed windows that aborts an evaluation.
    double failure_tolerance = 0.01;

    void validate() const;
    friend bool operator==(const EndpointConfig&, const EndpointConfig&) = default;
};

void to_json(nlohmann::ordered_json& j, const EndpointConfig& v);
void merge_json(const nlohmann::ordered_json& j, EndpointConfig& v);

struct QueryAttempt {
    int status = 0;  // HTTP status; 0 when no response arrived
    std::string error;
    long latency_ms = 0;
};

struct QueryResult {
    std::string text;
    std::vector<QueryAttempt> attempts;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);

// The chat-completions request body for one image and one prompt. A leading
// "<image>" placeholder is dropped from the text part.
nlohmann::ordered_json build_chat_request(const ImageArtifact& image, std::string_view question,
                                          const EndpointConfig& cfg);

// Retries 429, 5xx and transport failures with exponential backoff
// (backoff_base_ms * 2^attempt). CredentialError on a missing key or a
// 401/403; TransportError once retries run out; ProtocolError for any other
// status or an unreadable body.
QueryResult query_vlm_logged(const ImageArtifact& image, std::string_view question, const EndpointConfig& cfg);
std::string query_vlm(const ImageArtifact& image, std::string_view question, const EndpointConfig& cfg);

// One window of an evaluation run.
struct WindowTask {
    std::string window_id;
    int series = 0;
    int offset = 0;
    int length = 0;
    std::vector<double> values;
    // Ground truth in canonical coordinates; only test doubles read it.
    std::vector<Segment> truth;
};

class VlmBackend {
public:
    virtual ~VlmBackend() = default;
    virtual bool needs_image() const { return true; }
    virtual std::string respond(const WindowTask& task, const ImageArtifact& image, std::string_view question) = 0;
};

class HttpBackend final : public VlmBackend {
public:
    explicit HttpBackend(EndpointConfig cfg);
    std::string respond(const WindowTask& task, const ImageArtifact& image, std::string_view question) override;

private:
    EndpointConfig cfg_;
};

// Answers with the window's ground truth in the required format.
class OracleBackend final : public VlmBackend {
public:
    bool needs_image() const override { return false; }
    std::string respond(const WindowTask& task, const ImageArtifact& image, std::string_view question) override;
};

// Always answers that the window is anomaly-free.
class EmptyBackend final : public VlmBackend {
public:
    bool needs_image() const override { return false; }
    std::string respond(const WindowTask& task, const ImageArtifact& image, std::string_view question) override;
};

// Serves persisted responses by window id; never touches the network.
class ReplayBackend final : public VlmBackend {
public:
    explicit ReplayBackend(std::map<std::string, std::string> responses) : responses_(std::move(responses)) {}
    bool needs_image() const override { return false; }
    std::string respond(const WindowTask& task, const ImageArtifact& image, std::string_view question) override;

private:
    std::map<std::string, std::string> responses_;
};

struct LoggedResponse {
    std::string window_id;
    int offset = 0;
    std::string response;
    long latency_ms = 0;
};

std::map<std::string, std::string> read_response_log(const std::filesystem::path& path);

struct EvalOptions {
    int max_in_flight = 4;
    double failure_tolerance = 0.01;
    // JSONL {window_id, offset, response, latency_ms}, appended as responses
    // arrive.
    std::optional<std::filesystem::path> response_log;
};

// Windows of every series at least plan.window long, in series then offset
// order. Ground truth is mapped to canonical coordinates.
std::vector<WindowTask> plan_windows(const Dataset& dataset, const WindowPlan& plan);

// Scores a complete set of responses keyed by window id. Missing ids count as
// failed windows, unparseable responses as empty predictions.
EvalReport score_responses(const Dataset& dataset, const WindowPlan& plan,
                           const std::map<std::string, std::string>& responses);

// Render, query, persist, then score_responses. Throws PartialResultsError
// when failures exceed the tolerance.
EvalReport eval_dataset(const Dataset& dataset, const WindowPlan& plan, const RenderSpec& render_spec,
                        VlmBackend& backend, const EvalOptions& options = {});

} // namespace tsvlm
