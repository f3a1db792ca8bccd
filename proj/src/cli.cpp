// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "tsvlm/error.hpp"
#include "tsvlm/genkit.hpp"
#include "tsvlm/modelclient.hpp"
#include "tsvlm/qagen.hpp"
#include "tsvlm/render.hpp"
#include "tsvlm/reward.hpp"
#include "tsvlm/serialize.hpp"

namespace tsvlm {

namespace fs = std::filesystem;

namespace {

// Raised by subcommands for bad flag combinations or missing inputs.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int default_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Builds items [0, count) on `threads` workers and hands them to `consume` in
// index order, a chunk at a time.
template <typename T>
void ordered_parallel(std::size_t count, int threads, const std::function<T(std::size_t)>& make,
                      const std::function<void(std::size_t, T&&)>& consume) {
    const std::size_t chunk = std::max<std::size_t>(64, static_cast<std::size_t>(threads) * 16);
    std::vector<std::optional<T>> buf;
    for (std::size_t base = 0; base < count; base += chunk) {
        const std::size_t n = std::min(chunk, count - base);
        buf.assign(n, std::nullopt);
        if (threads <= 1) {
            for (std::size_t i = 0; i < n; ++i) buf[i] = make(base + i);
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr err;
            std::mutex mu;
            std::vector<std::thread> pool;
            for (int t = 0; t < std::min<int>(threads, static_cast<int>(n)); ++t)
                pool.emplace_back([&] {
                    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                        try {
                            buf[i] = make(base + i);
                        } catch (...) {
                            std::lock_guard lock(mu);
                            if (!err) err = std::current_exception();
                            next.store(n);
                        }
                    }
                });
            for (auto& th : pool) th.join();
            if (err) std::rethrow_exception(err);
        }
        for (std::size_t i = 0; i < n; ++i) consume(base + i, std::move(*buf[i]));
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory", dir.string());
}

std::string item_id(std::size_t index) { return fmt::format("ts{:06}", index); }

Json load_config(const std::optional<std::string>& path) {
    if (!path) return Json::object();
    Json j = read_json_file(*path);
    if (!j.is_object()) throw InvalidArgument(fmt::format("{}: config must be a JSON object", *path));
    return j;
}

template <typename T>
void merge_section(const Json& cfg, const char* key, T& target) {
    if (cfg.contains(key)) merge_json(cfg[key], target);
}

template <typename T>
void take(const Json& cfg, const char* key, T& target) {
    if (!cfg.contains(key)) return;
    try {
        target = cfg[key].get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(fmt::format("config key '{}': {}", key, e.what()));
    }
}

template <typename T>
void flag(const std::optional<T>& v, T& target) {
    if (v) target = *v;
}

std::string kind_table(const std::map<std::string, std::size_t>& counts, std::size_t series) {
    std::string out = fmt::format("{:<12} {:>10}\n", "kind", "intervals");
    for (auto k : {AnomalyKind::Spike, AnomalyKind::Level, AnomalyKind::Trend, AnomalyKind::Frequency}) {
        const auto it = counts.find(std::string(to_string(k)));
        out += fmt::format("{:<12} {:>10}\n", to_string(k), it == counts.end() ? 0 : it->second);
    }
    out += fmt::format("{:<12} {:>10}\n", "series", series);
    return out;
}

std::string report_table(const EvalReport& r) {
    std::string out = fmt::format("{:<10} {:>8}\n", "metric", "value");
    out += fmt::format("{:<10} {:>8.4f}\n", "precision", r.precision);
    out += fmt::format("{:<10} {:>8.4f}\n", "recall", r.recall);
    out += fmt::format("{:<10} {:>8.4f}\n", "f1", r.f1);
    out += fmt::format("{:<10} {:>8}\n", "threshold", r.threshold);
    out += fmt::format("{:<10} {:>8}\n", "windows", r.n_windows);
    if (r.n_failed || r.n_unparsed)
        out += fmt::format("{:<10} {:>8}\n{:<10} {:>8}\n", "failed", r.n_failed, "unparsed", r.n_unparsed);
    for (const auto& [k, s] : r.per_kind)
        out += fmt::format("{:<10} {:>8.4f}  ({}/{} segments)\n", k, s.recall(), s.detected, s.segments);
    return out;
}

// ---- gen -----------------------------------------------------------------

struct GenFlags {
    std::optional<std::string> config;
    std::optional<int> count, length, threads, max_anomalies, canonical;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, style;
    bool no_images = false;
    bool csv = false;
};

struct GenOutput {
    std::string line;
    std::vector<std::uint8_t> png;
    std::vector<double> values;
    std::vector<AnomalyInterval> intervals;
};

int cmd_gen(const GenFlags& f) {
    const Json file = load_config(f.config);
    GenConfig cfg;
    RenderSpec rs;
    std::uint64_t seed = 0;
    int count = 100, threads = default_threads();
    std::string out = "out";
    bool images = true, csv = false;
    merge_section(file, "gen", cfg);
    merge_section(file, "render", rs);
    take(file, "seed", seed);
    take(file, "count", count);
    take(file, "threads", threads);
    take(file, "out", out);
    take(file, "images", images);
    take(file, "csv", csv);
    flag(f.seed, seed);
    flag(f.count, count);
    flag(f.threads, threads);
    flag(f.out, out);
    flag(f.length, cfg.ts_length);
    flag(f.max_anomalies, cfg.max_anomalies);
    flag(f.canonical, rs.canonical_length);
    if (f.style) rs.style = render_style_from_string(*f.style);
    if (f.no_images) images = false;
    if (f.csv) csv = true;

    if (count < 0) throw InvalidArgument("--count must be non-negative");
    if (threads < 1) throw InvalidArgument("--threads must be positive");
    cfg.validate();
    if (images) {
        rs.validate();
        if (rs.style == RenderStyle::LineStft && rs.stft_window > cfg.ts_length)
            throw InvalidArgument("stft_window exceeds the series length");
    }

    const fs::path dir(out);
    ensure_dir(dir);
    if (images) ensure_dir(dir / "images");
    if (csv) ensure_dir(dir / "csv");
    Json resolved = {{"command", "gen"}, {"seed", seed},     {"count", count}, {"threads", threads},
                     {"out", out},       {"images", images}, {"csv", csv}};
    resolved["gen"] = cfg;
    resolved["render"] = rs;
    resolved["rng"] = kRngAlgorithm;
    write_json_file(resolved, dir / "resolved_config.json");

    const fs::path manifest = dir / "series.jsonl";
    std::ofstream mf(manifest, std::ios::binary | std::ios::trunc);
    if (!mf) throw IoError("cannot create manifest", manifest.string());
    std::map<std::string, std::size_t> per_kind;

    ordered_parallel<GenOutput>(
        static_cast<std::size_t>(count), threads,
        [&](std::size_t i) {
            auto [spec, labeled] = compose_series(seed, i, cfg);
            GenOutput o;
            const std::string id = item_id(i);
            Json j;
            j["id"] = id;
            j["index"] = i;
            j["seed"] = spec.seed;
            j["image"] = images ? "images/" + id + ".png" : "";
            j["spec"] = spec;
            j["values"] = labeled.values;
            j["intervals"] = labeled.intervals;
            j["attributes"] = labeled.attributes;
            o.line = j.dump();
            if (images) o.png = render(labeled.values, rs).png;
            o.values = std::move(labeled.values);
            o.intervals = std::move(labeled.intervals);
            return o;
        },
        [&](std::size_t i, GenOutput&& o) {
            const std::string id = item_id(i);
            if (images) {
                const auto p = dir / "images" / (id + ".png");
                std::ofstream img(p, std::ios::binary | std::ios::trunc);
                img.write(reinterpret_cast<const char*>(o.png.data()), static_cast<std::streamsize>(o.png.size()));
                if (!img) throw IoError("cannot write image", p.string());
            }
            if (csv) write_series_csv(o.values, (dir / "csv" / (id + ".csv")).string());
            mf << o.line << '\n';
            if (!mf) throw IoError("manifest write failed", manifest.string());
            for (const auto& iv : o.intervals) ++per_kind[std::string(to_string(iv.kind))];
            if ((i + 1) % 1000 == 0) fmt::print(stderr, "gen: {}/{}\n", i + 1, count);
        });
    mf.close();
    if (mf.fail()) throw IoError("manifest close failed", manifest.string());
    fmt::print("{}", kind_table(per_kind, static_cast<std::size_t>(count)));
    return kExitOk;
}

// ---- qa ------------------------------------------------------------------

struct QaFlags {
    std::optional<std::string> config, data, out, stage, style;
    std::optional<int> count, describe_count, detect_count, threads, canonical;
};

int cmd_qa(const QaFlags& f) {
    const Json file = load_config(f.config);
    RenderSpec rs;
    merge_section(file, "render", rs);
    std::string data, stage = "all";
    int threads = default_threads();
    take(file, "data", data);
    take(file, "stage", stage);
    take(file, "threads", threads);
    flag(f.data, data);
    flag(f.stage, stage);
    flag(f.threads, threads);
    flag(f.canonical, rs.canonical_length);
    if (f.style) rs.style = render_style_from_string(*f.style);
    if (data.empty()) throw UsageError("qa needs --data <gen output directory>");
    if (stage != "describe" && stage != "detect" && stage != "all")
        throw InvalidArgument(fmt::format("unknown stage '{}'", stage));
    if (threads < 1) throw InvalidArgument("--threads must be positive");
    rs.validate();

    if (!fs::exists(fs::path(data) / "series.jsonl")) throw UsageError(fmt::format("no series.jsonl under {}", data));
    const auto items = read_generated(data);
    if (items.empty()) throw UsageError(fmt::format("dataset {} is empty", data));
    const int n = static_cast<int>(items.size());

    int n_describe = 0, n_detect = 0;
    if (stage == "describe") n_describe = f.count.value_or(f.describe_count.value_or(n));
    else if (stage == "detect") n_detect = f.count.value_or(f.detect_count.value_or(n));
    else {
        if (f.count) throw UsageError("--stage all takes --describe-count/--detect-count instead of --count");
        n_describe = f.describe_count.value_or(n);
        n_detect = f.detect_count.value_or(n);
    }
    if (n_describe < 0 || n_detect < 0) throw InvalidArgument("record counts must be non-negative");
    if (n_describe > n || n_detect > n)
        throw InvalidArgument(fmt::format("requested more records than the {} series available", n));

    const fs::path out = f.out ? fs::path(*f.out) : fs::path(data) / "qa";
    ensure_dir(out);
    Json resolved = {{"command", "qa"},       {"data", data},         {"out", out.string()},
                     {"stage", stage},        {"describe_count", n_describe}, {"detect_count", n_detect},
                     {"threads", threads}};
    resolved["render"] = rs;
    write_json_file(resolved, out / "resolved_config.json");

    // Describe records first, then detect records, each in series order.
    struct Job {
        QAStage stage;
        int item;
    };
    std::vector<Job> jobs;
    for (int i = 0; i < n_describe; ++i) jobs.push_back({QAStage::Describe, i});
    for (int i = 0; i < n_detect; ++i) jobs.push_back({QAStage::Detect, i});

    ManifestWriter writer(out);
    ordered_parallel<QARecord>(
        jobs.size(), threads,
        [&](std::size_t k) {
            const auto& it = items[jobs[k].item];
            const auto image = render(it.labeled.values, rs);
            return make_qa(it.spec, it.labeled, image, jobs[k].stage,
                           fmt::format("{}-{}", it.id, to_string(jobs[k].stage)), "images/" + it.id + ".png");
        },
        [&](std::size_t, QARecord&& r) { writer.add(r); });
    writer.close();
    fmt::print("{}", format_summary_table(writer.summary()));
    return kExitOk;
}

// ---- reward --------------------------------------------------------------

struct RewardFlags {
    std::optional<std::string> config, input, output;
    std::optional<double> w_f1, w_format;
    bool no_negative = false;
};

int cmd_reward(const RewardFlags& f) {
    const Json file = load_config(f.config);
    RewardConfig cfg;
    merge_section(file, "reward", cfg);
    std::string input, output;
    take(file, "input", input);
    take(file, "output", output);
    flag(f.input, input);
    flag(f.output, output);
    flag(f.w_f1, cfg.w_f1);
    flag(f.w_format, cfg.w_format);
    if (f.w_f1 && !f.w_format) cfg.w_format = 1.0 - cfg.w_f1;
    if (f.no_negative) cfg.negative_reward_enabled = false;
    if (input.empty()) throw UsageError("reward needs --input <responses.jsonl>");
    cfg.validate();
    if (output.empty()) {
        fs::path p(input);
        output = (p.parent_path() / (p.stem().string() + ".rewards.jsonl")).string();
    }

    std::ifstream in(input);
    if (!in) throw IoError("cannot open reward input", input);
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write reward output", output);
    const auto summary = score_batch(in, out, cfg);
    out.close();
    if (out.fail()) throw IoError("reward output write failed", output);

    Json resolved = {{"command", "reward"}, {"input", input}, {"output", output}};
    resolved["reward"] = cfg;
    write_json_file(resolved, output + ".config.json");
    fmt::print("{:<14} {:>10}\n{:<14} {:>10}\n{:<14} {:>10}\n{:<14} {:>10.6f}\n", "lines", summary.lines, "malformed",
               summary.malformed, "negative", cfg.negative_reward_enabled ? "on" : "off", "mean reward",
               summary.mean_reward);
    return kExitOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalFlags {
    std::optional<std::string> config, dataset, data_root, replay, out, style;
    std::optional<std::string> base_url, model, api_key_env;
    std::optional<int> window, step, canonical, max_retries, backoff_ms, max_in_flight, timeout_ms, max_tokens;
    std::optional<double> resize_factor, test_fraction, failure_tolerance, temperature;
    bool oracle = false, empty = false;
};

Dataset load_any_dataset(const fs::path& dir, std::optional<double> test_fraction) {
    if (fs::exists(dir / "series.jsonl")) return dataset_from_generated(read_generated(dir), dir.filename().string());
    return load_dataset(dir, test_fraction);
}

int cmd_eval(const EvalFlags& f) {
    const Json file = load_config(f.config);
    WindowPlan plan;
    RenderSpec rs;
    EndpointConfig ep;
    merge_section(file, "window", plan);
    merge_section(file, "render", rs);
    merge_section(file, "endpoint", ep);
    std::string dataset, data_root = ".", out = "eval_out";
    std::optional<double> test_fraction;
    take(file, "dataset", dataset);
    take(file, "data_root", data_root);
    take(file, "out", out);
    if (file.contains("test_fraction")) test_fraction = file["test_fraction"].get<double>();
    flag(f.dataset, dataset);
    flag(f.data_root, data_root);
    flag(f.out, out);
    if (f.test_fraction) test_fraction = f.test_fraction;
    flag(f.window, plan.window);
    flag(f.step, plan.step);
    flag(f.resize_factor, plan.resize_factor);
    if (f.canonical) plan.canonical_override = *f.canonical;
    if (f.style) rs.style = render_style_from_string(*f.style);
    flag(f.base_url, ep.base_url);
    flag(f.model, ep.model_name);
    flag(f.api_key_env, ep.api_key_env);
    flag(f.max_retries, ep.max_retries);
    flag(f.backoff_ms, ep.backoff_base_ms);
    flag(f.max_in_flight, ep.max_in_flight);
    flag(f.timeout_ms, ep.timeout_ms);
    flag(f.max_tokens, ep.max_output_tokens);
    flag(f.failure_tolerance, ep.failure_tolerance);
    flag(f.temperature, ep.temperature);

    const int modes = int(f.oracle) + int(f.empty) + int(f.replay.has_value());
    if (modes > 1) throw UsageError("--oracle, --empty and --replay are mutually exclusive");
    if (dataset.empty()) throw UsageError("eval needs --dataset <dir or name>");
    plan.validate();
    ep.validate();
    rs.canonical_length = plan.canonical_length();

    fs::path dir(dataset);
    if (!fs::is_directory(dir)) dir = fs::path(data_root) / dataset;
    if (!fs::is_directory(dir)) throw UsageError(fmt::format("dataset directory {} not found", dataset));
    const Dataset ds = load_any_dataset(dir, test_fraction);
    if (ds.series.empty()) throw UsageError(fmt::format("dataset {} has no series", dir.string()));

    const fs::path out_dir(out);
    ensure_dir(out_dir);
    const std::string mode = f.oracle ? "oracle" : f.empty ? "empty" : f.replay ? "replay" : "http";
    Json resolved = {{"command", "eval"}, {"dataset", dir.string()}, {"mode", mode}, {"out", out}};
    resolved["window"] = plan;
    resolved["render"] = rs;
    resolved["endpoint"] = ep;
    if (test_fraction) resolved["test_fraction"] = *test_fraction;
    if (f.replay) resolved["replay"] = *f.replay;
    write_json_file(resolved, out_dir / "resolved_config.json");

    EvalReport report;
    if (f.replay) {
        // Pure re-scoring of persisted responses.
        report = score_responses(ds, plan, read_response_log(*f.replay));
    } else {
        std::unique_ptr<VlmBackend> backend;
        if (f.oracle) backend = std::make_unique<OracleBackend>();
        else if (f.empty) backend = std::make_unique<EmptyBackend>();
        else backend = std::make_unique<HttpBackend>(ep);
        EvalOptions opts;
        opts.max_in_flight = ep.max_in_flight;
        opts.failure_tolerance = ep.failure_tolerance;
        opts.response_log = out_dir / "responses.jsonl";
        report = eval_dataset(ds, plan, rs, *backend, opts);
    }
    Json rj = report;
    write_json_file(rj, out_dir / "report.json");
    fmt::print("{}", report_table(report));
    return kExitOk;
}

// ---- diversity -----------------------------------------------------------

struct DiversityFlags {
    std::optional<std::string> config, data, out;
    std::optional<int> pairs;
    std::optional<std::uint64_t> seed;
};

int cmd_diversity(const DiversityFlags& f) {
    const Json file = load_config(f.config);
    std::string data, out;
    int pairs = 2000;
    std::uint64_t seed = 0;
    take(file, "data", data);
    take(file, "out", out);
    take(file, "pairs", pairs);
    take(file, "seed", seed);
    flag(f.data, data);
    flag(f.out, out);
    flag(f.pairs, pairs);
    flag(f.seed, seed);
    if (data.empty()) throw UsageError("diversity needs --data <dataset directory>");
    if (!fs::is_directory(data)) throw UsageError(fmt::format("dataset directory {} not found", data));
    const Dataset ds = load_any_dataset(data, 1.0);
    std::vector<std::vector<double>> set;
    set.reserve(ds.series.size());
    for (const auto& s : ds.series) set.push_back(s.values);
    const fs::path out_path = out.empty() ? fs::path(data) / "diversity_cdf.csv" : fs::path(out);
    const auto cdf = diversity_cdf(set, pairs, seed);
    write_cdf_csv(cdf, out_path);
    Json resolved = {{"command", "diversity"}, {"data", data}, {"out", out_path.string()}, {"pairs", pairs},
                     {"seed", seed}};
    write_json_file(resolved, out_path.string() + ".config.json");
    const auto quantile = [&](double q) {
        for (const auto& p : cdf)
            if (p.fraction >= q) return p.distance;
        return cdf.back().distance;
    };
    fmt::print("{:<8} {:>12}\n{:<8} {:>12.4f}\n{:<8} {:>12.4f}\n{:<8} {:>12.4f}\n", "pairs", pairs, "p10",
               quantile(0.1), "median", quantile(0.5), "p90", quantile(0.9));
    return kExitOk;
}

// ---- slice ---------------------------------------------------------------

struct SliceFlags {
    std::optional<std::string> config, input, out;
    std::optional<int> window, step;
};

int cmd_slice(const SliceFlags& f) {
    const Json file = load_config(f.config);
    WindowPlan plan;
    merge_section(file, "window", plan);
    std::string input, out;
    take(file, "input", input);
    take(file, "out", out);
    flag(f.input, input);
    flag(f.out, out);
    flag(f.window, plan.window);
    flag(f.step, plan.step);
    if (input.empty()) throw UsageError("slice needs --input <series.csv>");
    plan.validate();
    const auto series = read_series_csv(input);
    const auto windows = slice_windows(series.values, series.labels, plan);
    const fs::path dir = out.empty() ? fs::path(input).parent_path() / (series.id + "_windows") : fs::path(out);
    ensure_dir(dir);
    for (const auto& w : windows) {
        const auto p = dir / fmt::format("{}_{:08}.csv", series.id, w.offset);
        std::ofstream o(p, std::ios::trunc);
        o << "value,label\n";
        for (std::size_t i = 0; i < w.values.size(); ++i)
            o << fmt::format("{},{}\n", w.values[i], w.labels.empty() ? 0 : w.labels[i]);
        if (!o) throw IoError("cannot write window", p.string());
    }
    Json resolved = {{"command", "slice"}, {"input", input}, {"out", dir.string()}};
    resolved["window"] = plan;
    write_json_file(resolved, dir / "resolved_config.json");
    fmt::print("{:<8} {:>8}\n", "offset", "length");
    for (const auto& w : windows) fmt::print("{:<8} {:>8}\n", w.offset, w.values.size());
    return kExitOk;
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Synthetic time-series anomaly data, rewards and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tsvlm 0.1.0");

    GenFlags gen;
    auto* g = app.add_subcommand("gen", "Generate labeled series and their images");
    g->add_option("--config", gen.config, "JSON config file");
    g->add_option("--count", gen.count, "number of series");
    g->add_option("--length", gen.length, "points per series");
    g->add_option("--seed", gen.seed, "master seed");
    g->add_option("--out", gen.out, "output directory");
    g->add_option("--threads", gen.threads, "worker threads");
    g->add_option("--max-anomalies", gen.max_anomalies, "anomalies per series, at most 3");
    g->add_option("--canonical", gen.canonical, "canonical plot length");
    g->add_option("--style", gen.style, "line or line+stft");
    g->add_flag("--no-images", gen.no_images, "skip PNG rendering");
    g->add_flag("--csv", gen.csv, "also write one CSV per series");

    QaFlags qa;
    auto* q = app.add_subcommand("qa", "Build describe and detect QA records");
    q->add_option("--config", qa.config, "JSON config file");
    q->add_option("--data", qa.data, "gen output directory");
    q->add_option("--out", qa.out, "output directory (default <data>/qa)");
    q->add_option("--stage", qa.stage, "describe, detect or all");
    q->add_option("--count", qa.count, "records for a single stage");
    q->add_option("--describe-count", qa.describe_count, "describe records with --stage all");
    q->add_option("--detect-count", qa.detect_count, "detect records with --stage all");
    q->add_option("--threads", qa.threads, "worker threads");
    q->add_option("--canonical", qa.canonical, "canonical plot length");
    q->add_option("--style", qa.style, "line or line+stft");

    RewardFlags rw;
    auto* r = app.add_subcommand("reward", "Score model responses against ground truth");
    r->add_option("--config", rw.config, "JSON config file");
    r->add_option("--input", rw.input, "JSONL of {response, intervals, window_len}");
    r->add_option("--output", rw.output, "JSONL of reward components");
    r->add_option("--w-f1", rw.w_f1, "weight of the F1 term");
    r->add_option("--w-format", rw.w_format, "weight of the format term");
    r->add_flag("--no-negative-reward", rw.no_negative, "score anomaly-free windows by F1 only");

    EvalFlags ev;
    auto* e = app.add_subcommand("eval", "Evaluate a detector over a windowed dataset");
    e->add_option("--config", ev.config, "JSON config file");
    e->add_option("--dataset", ev.dataset, "dataset directory or name under --data-root");
    e->add_option("--data-root", ev.data_root, "directory holding named datasets");
    e->add_option("--test-fraction", ev.test_fraction, "trailing fraction of each series to score");
    e->add_option("--out", ev.out, "output directory");
    e->add_flag("--oracle", ev.oracle, "answer from ground truth");
    e->add_flag("--empty", ev.empty, "always answer anomaly-free");
    e->add_option("--replay", ev.replay, "re-score a persisted responses.jsonl");
    e->add_option("--window", ev.window, "window length");
    e->add_option("--step", ev.step, "window stride");
    e->add_option("--resize-factor", ev.resize_factor, "canonical length = round(window * factor)");
    e->add_option("--canonical", ev.canonical, "explicit canonical length");
    e->add_option("--style", ev.style, "line or line+stft");
    e->add_option("--base-url", ev.base_url, "endpoint base URL");
    e->add_option("--model", ev.model, "model name");
    e->add_option("--api-key-env", ev.api_key_env, "environment variable with the API key");
    e->add_option("--temperature", ev.temperature, "sampling temperature");
    e->add_option("--max-tokens", ev.max_tokens, "maximum output tokens");
    e->add_option("--max-retries", ev.max_retries, "retries per request");
    e->add_option("--backoff-ms", ev.backoff_ms, "base backoff in milliseconds");
    e->add_option("--max-in-flight", ev.max_in_flight, "concurrent requests");
    e->add_option("--timeout-ms", ev.timeout_ms, "per-request timeout");
    e->add_option("--failure-tolerance", ev.failure_tolerance, "fraction of failed windows that aborts");

    DiversityFlags dv;
    auto* d = app.add_subcommand("diversity", "DTW distance CDF over random series pairs");
    d->add_option("--config", dv.config, "JSON config file");
    d->add_option("--data", dv.data, "gen output or CSV dataset directory");
    d->add_option("--pairs", dv.pairs, "number of distinct pairs");
    d->add_option("--seed", dv.seed, "pair sampling seed");
    d->add_option("--out", dv.out, "CDF CSV path");

    SliceFlags sl;
    auto* s = app.add_subcommand("slice", "Cut one CSV series into windows");
    s->add_option("--config", sl.config, "JSON config file");
    s->add_option("--input", sl.input, "series CSV");
    s->add_option("--out", sl.out, "output directory");
    s->add_option("--window", sl.window, "window length");
    s->add_option("--step", sl.step, "window stride");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (g->parsed()) return cmd_gen(gen);
    if (q->parsed()) return cmd_qa(qa);
    if (r->parsed()) return cmd_reward(rw);
    if (e->parsed()) return cmd_eval(ev);
    if (d->parsed()) return cmd_diversity(dv);
    return cmd_slice(sl);
}

} // namespace

std::vector<GeneratedItem> read_generated(const fs::path& dir) {
    const auto path = dir / "series.jsonl";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open generated series", path.string());
    std::vector<GeneratedItem> items;
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = Json::parse(line);
            GeneratedItem it;
            it.id = j.at("id").get<std::string>();
            it.image = j.value("image", "");
            it.spec = j.at("spec").get<SeriesSpec>();
            it.labeled.values = j.at("values").get<std::vector<double>>();
            it.labeled.intervals = j.at("intervals").get<std::vector<AnomalyInterval>>();
            it.labeled.attributes = j.at("attributes").get<SeriesAttributes>();
            items.push_back(std::move(it));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(fmt::format("line {} is not a generated series record ({})", n, e.what()), path.string());
        }
    }
    return items;
}

Dataset dataset_from_generated(const std::vector<GeneratedItem>& items, std::string name) {
    Dataset ds;
    ds.name = std::move(name);
    for (const auto& it : items) {
        DatasetSeries s;
        s.id = it.id;
        s.values = it.labeled.values;
        s.labels = labels_from_intervals(it.labeled.intervals, it.labeled.length());
        s.typed = it.labeled.intervals;
        ds.series.push_back(std::move(s));
    }
    return ds;
}

int run_cli(int argc, const char* const* argv) {
    try {
        return dispatch(argc, argv);
    } catch (const UsageError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        fmt::print(stderr, "invalid configuration: {}\n", e.what());
        return kExitUsage;
    } catch (const PartialResultsError& e) {
        fmt::print(stderr, "evaluation aborted: {}\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitRuntime;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace tsvlm
