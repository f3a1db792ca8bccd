// SPDX-License-Identifier: Apache-2.0
// Runs the acceptance criteria and prints one PASS/FAIL line for each.
#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "tsvlm/anomaly.hpp"
#include "tsvlm/cli.hpp"
#include "tsvlm/error.hpp"
#include "tsvlm/evalkit.hpp"
#include "tsvlm/fourier.hpp"
#include "tsvlm/genkit.hpp"
#include "tsvlm/modelclient.hpp"
#include "tsvlm/parsefmt.hpp"
#include "tsvlm/reward.hpp"

using namespace tsvlm;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Silences in-process CLI runs so only verdict lines reach the log.
class Quiet {
public:
    Quiet() {
        std::fflush(stdout);
        std::fflush(stderr);
        out_ = dup(STDOUT_FILENO);
        err_ = dup(STDERR_FILENO);
        const int null = open("/dev/null", O_WRONLY);
        dup2(null, STDOUT_FILENO);
        dup2(null, STDERR_FILENO);
        close(null);
    }
    ~Quiet() {
        std::fflush(stdout);
        std::fflush(stderr);
        dup2(out_, STDOUT_FILENO);
        dup2(err_, STDERR_FILENO);
        close(out_);
        close(err_);
    }

private:
    int out_ = -1, err_ = -1;
};

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tsvlm");
    Quiet quiet;
    return run_cli(args);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Reward case table, ablation and weighted composites.
Outcome reward_cases() {
    using Segs = std::vector<Segment>;
    const RewardConfig on;
    RewardConfig off;
    off.negative_reward_enabled = false;
    const PredictedIntervals empty{{}, ""}, some{{{1, 2}}, ""}, exact{{{10, 19}}, ""}, half{{{10, 19}}, ""};
    struct Case {
        const char* name;
        double got, want;
    };
    const std::vector<Case> cases{
        {"real=[] pred=[]", f1_reward(empty, Segs{}, 200, on), 0.5},
        {"real=[] pred=[(1,2)]", f1_reward(some, Segs{}, 200, on), -0.5},
        {"real=[(10,19)] pred=[(10,19)]", f1_reward(exact, Segs{{10, 19}}, 200, on), 1.0},
        {"real=[(15,24)] pred=[(10,19)]", f1_reward(half, Segs{{15, 24}}, 200, on), 0.5},
        {"ablation real=[] pred=[]", f1_reward(empty, Segs{}, 200, off), 0.0},
        {"ablation real=[] pred=[(1,2)]", f1_reward(some, Segs{}, 200, off), 0.0},
        {"format+exact", combined_reward("<think>a</think> boxed{[[10, 19]]}", Segs{{10, 19}}, 200).reward, 1.0},
        {"format+empty", combined_reward("<think>a</think> boxed{[]}", Segs{}, 200).reward, 0.55},
        {"no tags, false positive", combined_reward("boxed{[[1, 2]]}", Segs{}, 200).reward, -0.45},
    };
    Outcome o{true, ""};
    for (const auto& c : cases) {
        if (std::abs(c.got - c.want) > 1e-9) {
            o.pass = false;
            o.detail += fmt::format("{}: got {} want {}; ", c.name, c.got, c.want);
        }
    }
    if (o.pass) o.detail = fmt::format("{} cases within 1e-9", cases.size());
    return o;
}

// 2. Point-adjusted best F1 against an exhaustive sweep.
Outcome pa_oracle() {
    Rng rng(20260101);
    int mismatches = 0;
    const int n_cases = 500;
    for (int c = 0; c < n_cases; ++c) {
        const int n = static_cast<int>(rng.uniform_int(1, 32));
        std::vector<int> labels(n, 0), scores(n);
        const int segs = static_cast<int>(rng.uniform_int(0, 3));
        for (int s = 0; s < segs; ++s) {
            const int a = static_cast<int>(rng.uniform_int(0, n - 1));
            const int len = static_cast<int>(rng.uniform_int(1, std::max(1, n / 4)));
            for (int t = a; t < std::min(n, a + len); ++t) labels[t] = 1;
        }
        for (auto& v : scores) v = static_cast<int>(rng.uniform_int(0, 4));

        // Brute force: expand hits over each labeled run, for every tau.
        double best_f = -1, best_p = 0, best_r = 0;
        int best_tau = 1;
        const std::set<int> distinct(scores.begin(), scores.end());
        for (int tau : distinct) {
            if (tau <= 0) continue;
            std::vector<int> pred(n);
            for (int i = 0; i < n; ++i) pred[i] = scores[i] >= tau;
            for (int i = 0; i < n;) {
                if (!labels[i]) {
                    ++i;
                    continue;
                }
                int j = i;
                bool hit = false;
                while (j < n && labels[j]) hit |= pred[j] != 0, ++j;
                for (int k = i; hit && k < j; ++k) pred[k] = 1;
                i = j;
            }
            long tp = 0, fp = 0, fn = 0;
            for (int i = 0; i < n; ++i) tp += pred[i] && labels[i], fp += pred[i] && !labels[i], fn += !pred[i] && labels[i];
            const double f = tp ? double(2 * tp) / double(2 * tp + fp + fn) : 0.0;
            if (f > best_f) {
                best_f = f;
                best_p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
                best_r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
                best_tau = tau;
            }
        }
        if (best_f < 0) best_f = 0;
        const auto rep = point_adjusted_best_f1(scores, labels);
        if (rep.f1 != best_f || rep.precision != best_p || rep.recall != best_r || rep.threshold != best_tau) ++mismatches;
    }
    return {mismatches == 0, fmt::format("{} cases, {} mismatches", n_cases, mismatches)};
}

Dataset synthetic_dataset(int n_series, std::uint64_t seed) {
    Dataset ds;
    ds.name = "synthetic";
    GenConfig cfg;
    for (int i = 0; i < n_series; ++i) {
        const auto [spec, l] = compose_series(seed, static_cast<std::uint64_t>(i), cfg);
        DatasetSeries s;
        s.id = fmt::format("s{:04}", i);
        s.values = l.values;
        s.labels = labels_from_intervals(l.intervals, l.length());
        s.typed = l.intervals;
        ds.series.push_back(std::move(s));
    }
    return ds;
}

// Ground-truth double that insists on a decodable image of the right size.
class RenderingOracle final : public VlmBackend {
public:
    std::string respond(const WindowTask& task, const ImageArtifact& image, std::string_view question) override {
        if (image.png.empty() || image.source_length != task.length) throw ProtocolError("window was not rendered");
        const auto img = decode_png(image.png);
        if (img.width != 800) throw ProtocolError("unexpected image width");
        return inner_.respond(task, image, question);
    }

private:
    OracleBackend inner_;
};

class RenderingEmpty final : public VlmBackend {
public:
    std::string respond(const WindowTask& task, const ImageArtifact& image, std::string_view question) override {
        if (image.png.empty()) throw ProtocolError("window was not rendered");
        return inner_.respond(task, image, question);
    }

private:
    EmptyBackend inner_;
};

// 3. Oracle and empty doubles through render, query, parse, map and score.
Outcome oracle_pipeline() {
    const auto ds = synthetic_dataset(500, 3);
    const WindowPlan plan;
    RenderingOracle oracle;
    const auto rep = eval_dataset(ds, plan, RenderSpec{}, oracle, EvalOptions{1, 0.0, std::nullopt});
    // Downsampled route: 100-point windows drawn at 200 canonical points.
    const auto half = synthetic_dataset(250, 4);
    WindowPlan up;
    up.window = 100;
    up.step = 100;
    up.canonical_override = 200;
    const auto rep2 = eval_dataset(half, up, RenderSpec{}, oracle, EvalOptions{1, 0.0, std::nullopt});
    RenderingEmpty empty;
    const auto none = eval_dataset(ds, plan, RenderSpec{}, empty, EvalOptions{1, 0.0, std::nullopt});
    const bool ok = rep.n_windows == 500 && rep.f1 == 1.0 && rep2.n_windows == 500 && rep2.f1 == 1.0 && none.recall == 0.0;
    return {ok, fmt::format("oracle F1 {:.3f} on {} windows, oracle F1 {:.3f} on {} rescaled windows, empty recall {:.3f}",
                            rep.f1, rep.n_windows, rep2.f1, rep2.n_windows, none.recall)};
}

// 4. Dominant DFT bin of generated seasonal components.
Outcome spectral() {
    GenConfig cfg;
    const int n_series = 1000, L = cfg.ts_length;
    int ok = 0;
    std::vector<std::complex<double>> tw(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j) tw[j] = std::polar(1.0, -2.0 * kPi * j / L);
    for (int i = 0; i < n_series; ++i) {
        Rng rng(item_seed(4, static_cast<std::uint64_t>(i)));
        const auto s = sample_seasonal(rng, cfg);
        const auto x = gen_seasonal(s, L);
        int best = 0;
        double best_mag = -1;
        for (int k = 0; k <= L / 2; ++k) {
            std::complex<double> acc = 0;
            for (int t = 0; t < L; ++t) acc += x[t] * tw[(static_cast<long>(k) * t) % L];
            if (std::abs(acc) > best_mag) best_mag = std::abs(acc), best = k;
        }
        ok += std::abs(best - std::lround(L / s.period)) <= 1;
    }
    const double rate = double(ok) / n_series;
    return {rate >= 0.99, fmt::format("{}/{} within one bin ({:.1f}%, need 99%)", ok, n_series, 100 * rate)};
}

// 5. Uniform truncation bound for a sawtooth.
Outcome sawtooth_bound() {
    const int m = 4096;
    std::vector<double> f(m);
    for (int j = 0; j < m; ++j) {
        const double x = 2.0 * kPi * j / m;
        f[j] = j == 0 ? 0.0 : (kPi - x) / 2.0;
    }
    const double v = total_variation(f);
    bool pass = true;
    std::string detail = fmt::format("V={:.4f};", v);
    for (int n : {4, 8, 16}) {
        const auto s = fourier_coefficients(f, n);
        double worst = 0.0, worst_interior = 0.0;
        for (int j = 0; j < m; ++j) {
            const double x = 2.0 * kPi * j / m;
            const double err = std::abs(f[j] - partial_sum(s, x));
            worst = std::max(worst, err);
            if (x > 0.5 && x < 2 * kPi - 0.5) worst_interior = std::max(worst_interior, err);
        }
        const double bound = v / (kPi * n);
        pass = pass && worst < bound;
        detail += fmt::format(" N={} max|f-S_N|={:.4f} bound={:.4f} (away from the jump {:.4f});", n, worst, bound,
                              worst_interior);
    }
    if (!pass) detail += " the jump at 0 keeps the error near pi/2 for every N";
    return {pass, detail};
}

// 6. Injection locality and label soundness.
Outcome injection_locality() {
    GenConfig cfg;
    int injections = 0, violations = 0;
    for (std::uint64_t i = 0; injections < 1000; ++i) {
        const auto [spec, labeled] = compose_series(6, i, cfg);
        SeriesSpec clean_spec = spec;
        clean_spec.anomaly_plan.clear();
        const auto clean = realize(clean_spec);
        const int L = spec.ts_length;
        for (const auto& a : spec.anomaly_plan) {
            const auto one = apply_anomaly(clean, a, spec.seasonal);
            const auto seg = labeled_segment(a, L);
            for (int t = 0; t < L; ++t)
                if ((t < seg.start || t > seg.end) && std::abs(one.values[t] - clean.values[t]) > 1e-9) ++violations;
            ++injections;
        }
        std::vector<char> inside(static_cast<std::size_t>(L), 0);
        for (const auto& iv : labeled.intervals) {
            if (iv.start < 0 || iv.start > iv.end || iv.end >= L) ++violations;
            for (int t = std::max(iv.start, 0); t <= std::min(iv.end, L - 1); ++t) {
                if (inside[t]) ++violations;
                inside[t] = 1;
            }
        }
        for (int t = 0; t < L; ++t)
            if (!inside[t] && std::abs(labeled.values[t] - clean.values[t]) > 1e-9) ++violations;
    }
    return {violations == 0, fmt::format("{} injections, {} violations", injections, violations)};
}

// 7. Byte-identical generation across runs and thread counts.
Outcome determinism(const fs::path& tmp) {
    const auto dir = [&](const char* n) { return (tmp / "det" / n).string(); };
    int rc = 0;
    rc |= cli({"gen", "--count", "1000", "--seed", "7", "--threads", "1", "--out", dir("a")});
    rc |= cli({"gen", "--count", "1000", "--seed", "7", "--threads", "1", "--out", dir("b")});
    rc |= cli({"gen", "--count", "1000", "--seed", "7", "--threads", "4", "--out", dir("c")});
    if (rc) return {false, "gen failed"};
    const auto a = slurp(fs::path(dir("a")) / "series.jsonl");
    const bool same_runs = a == slurp(fs::path(dir("b")) / "series.jsonl");
    const bool same_threads = a == slurp(fs::path(dir("c")) / "series.jsonl");
    int image_diffs = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto name = fmt::format("images/ts{:06}.png", i);
        const auto img = slurp(fs::path(dir("a")) / name);
        if (img.empty() || img != slurp(fs::path(dir("b")) / name) || img != slurp(fs::path(dir("c")) / name)) ++image_diffs;
    }
    fs::remove_all(tmp / "det");
    return {same_runs && same_threads && image_diffs == 0 && !a.empty(),
            fmt::format("manifest {} bytes; run-to-run {}, 1 vs 4 threads {}, differing images {}", a.size(),
                        same_runs ? "identical" : "DIFFERENT", same_threads ? "identical" : "DIFFERENT", image_diffs)};
}

// 8. Interval rescaling round trip.
Outcome rescale_round_trip() {
    int worst = 0;
    long count = 0, identity_errors = 0;
    for (int s = 0; s <= 800; ++s) {
        for (int e = s; e <= 800; ++e) {
            const std::vector<Segment> in{{s, e}};
            const auto back = map_intervals(map_intervals(in, 0.25, MapDirection::ToCanonical), 0.25, MapDirection::ToOriginal);
            worst = std::max({worst, std::abs(back[0].start - s), std::abs(back[0].end - e)});
            for (auto dir : {MapDirection::ToCanonical, MapDirection::ToOriginal})
                identity_errors += map_intervals(in, 1.0, dir)[0] != in[0];
            ++count;
        }
    }
    return {worst <= 4 && identity_errors == 0,
            fmt::format("{} intervals, worst deviation {} at factor 0.25, {} errors at factor 1", count, worst,
                        identity_errors)};
}

// 9. 15k-record QA build and detect answer round trip.
Outcome qa_round_trip(const fs::path& tmp) {
    const auto data = tmp / "qa_src";
    if (cli({"gen", "--count", "10000", "--seed", "9", "--no-images", "--out", data.string()}) != 0)
        return {false, "gen failed"};
    if (cli({"qa", "--data", data.string(), "--stage", "all", "--describe-count", "5000", "--detect-count", "10000"}) != 0)
        return {false, "qa failed"};

    std::vector<std::vector<Segment>> truth;
    {
        std::ifstream in(data / "series.jsonl");
        for (std::string line; std::getline(in, line);) {
            const auto j = Json::parse(line);
            std::vector<Segment> segs;
            for (const auto& iv : j.at("intervals")) segs.push_back({iv.at("start").get<int>(), iv.at("end").get<int>()});
            truth.push_back(std::move(segs));
        }
    }
    std::ifstream in(data / "qa" / "manifest.jsonl");
    int describe = 0, detect = 0, mismatches = 0, missing_images = 0;
    for (std::string line; std::getline(in, line);) {
        const auto j = Json::parse(line);
        const std::string id = j.at("id");
        if (!fs::exists(data / "qa" / j.at("image").get<std::string>())) ++missing_images;
        if (j.at("stage") == "describe") {
            ++describe;
            continue;
        }
        ++detect;
        const auto index = static_cast<std::size_t>(std::stoul(id.substr(2, 6)));
        const auto parsed = try_parse_boxed_intervals(j.at("answer").get<std::string>(), 200);
        if (!parsed || index >= truth.size() || parsed->intervals != truth[index]) ++mismatches;
    }
    fs::remove_all(data);
    return {describe == 5000 && detect == 10000 && mismatches == 0 && missing_images == 0,
            fmt::format("describe {}, detect {}, round-trip mismatches {}, missing images {}", describe, detect,
                        mismatches, missing_images)};
}

// 10. DTW against the full-matrix reference.
Outcome dtw_oracle() {
    Rng rng(10);
    int mismatches = 0;
    for (int p = 0; p < 100; ++p) {
        std::vector<double> a(static_cast<std::size_t>(rng.uniform_int(1, 64))), b(static_cast<std::size_t>(rng.uniform_int(1, 64)));
        for (auto& x : a) x = rng.normal(0.0, 1.0);
        for (auto& x : b) x = rng.normal(0.0, 1.0);
        std::vector<std::vector<double>> d(a.size() + 1, std::vector<double>(b.size() + 1, INFINITY));
        d[0][0] = 0.0;
        for (std::size_t i = 1; i <= a.size(); ++i)
            for (std::size_t j = 1; j <= b.size(); ++j)
                d[i][j] = std::abs(a[i - 1] - b[j - 1]) + std::min({d[i - 1][j - 1], d[i - 1][j], d[i][j - 1]});
        const double got = dtw_distance(a, b);
        mismatches += got != d[a.size()][b.size()] || dtw_distance(a, a) != 0.0 || dtw_distance(b, a) != got;
    }
    return {mismatches == 0, fmt::format("100 pairs, {} mismatches", mismatches)};
}

// 11. Parser fuzzing: raw bytes, then well-formed answers with random edits.
Outcome parser_fuzz() {
    Rng rng(11);
    const std::string tokens = "boxed{}[],.-+eE0123456789 \t\n";
    const auto pick = [&](const std::string& from) {
        return from[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(from.size()) - 1))];
    };
    long successes = 0, broken = 0;
    const int n = 100000;
    for (int i = 0; i < 2 * n; ++i) {
        std::string s;
        if (i < n) {
            const int len = static_cast<int>(rng.uniform_int(0, 64));
            for (int k = 0; k < len; ++k) s += static_cast<char>(rng.uniform_int(0, 255));
        } else {
            s = "boxed{[";
            const int pairs = static_cast<int>(rng.uniform_int(0, 4));
            for (int k = 0; k < pairs; ++k)
                s += fmt::format("{}[{}, {}]", k ? ", " : "", rng.uniform(-100.0, 400.0), rng.uniform_int(-50, 300));
            s += "]}";
            const int edits = static_cast<int>(rng.uniform_int(0, 3));
            for (int k = 0; k < edits && !s.empty(); ++k) {
                const auto at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(s.size()) - 1));
                switch (rng.uniform_int(0, 2)) {
                case 0: s.erase(at, 1); break;
                case 1: s.insert(at, 1, pick(tokens)); break;
                default: s[at] = static_cast<char>(rng.uniform_int(0, 255));
                }
            }
        }
        const auto r = try_parse_boxed_intervals(s, 200);
        check_format(s);
        if (!r) continue;
        ++successes;
        const auto again = try_parse_boxed_intervals(to_boxed(r->intervals), 200);
        if (!again || again->intervals != r->intervals) ++broken;
    }
    return {broken == 0, fmt::format("{} random byte strings + {} edited answers, no crash, {} parsed, {} not at a fixed point",
                                     n, n, successes, broken)};
}

// 12. Single-threaded generation throughput.
Outcome throughput() {
    GenConfig cfg;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t intervals = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) intervals += compose_series(12, i, cfg).second.intervals.size();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {s < 60.0, fmt::format("10000 series, {} labeled intervals in {:.2f} s", intervals, s)};
}

} // namespace

int main() {
    const fs::path tmp = fs::temp_directory_path() / fmt::format("tsvlm_acceptance_{}", getpid());
    fs::create_directories(tmp);
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"reward arithmetic", 1, reward_cases},
        {"point-adjusted F1 oracle", 10, pa_oracle},
        {"end-to-end oracle pipeline", 120, oracle_pipeline},
        {"spectral generator", 30, spectral},
        {"sawtooth truncation bound", 5, sawtooth_bound},
        {"injection locality", 30, injection_locality},
        {"generation determinism", 60, [&] { return determinism(tmp); }},
        {"rescale round trip", 5, rescale_round_trip},
        {"QA round trip", 120, [&] { return qa_round_trip(tmp); }},
        {"DTW oracle", 10, dtw_oracle},
        {"parser robustness", 60, parser_fuzz},
        {"generation throughput", 60, throughput},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = s < c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        fmt::print("{} [{:2}] {}: {} ({:.2f} s, budget {:.0f} s{})\n", pass ? "PASS" : "FAIL", i + 1, c.name, o.detail, s,
                   c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    fs::remove_all(tmp);
    fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures ? 1 : 0;
}
