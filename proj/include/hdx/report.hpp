#pragma once

// JSON report envelopes. Reports embed the configuration and are emitted
// with stable key order so identical runs are byte-identical.

#include <chrono>
#include <string>

#include <json.hpp>

#include "hdx/spectral.hpp"

namespace hdx {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

inline ordered_json spectral_report_json(const SpectralReport& r) {
    ordered_json j;
    j["n"] = r.n;
    j["m"] = r.m;
    j["lambda"] = r.lambda;
    j["method"] = r.method;
    j["iterations"] = r.iterations;
    j["tolerance"] = r.tolerance;
    if (!r.connected) j["connected"] = false;
    return j;
}

// Envelope: {version, config, elapsed_seconds, payload}. The wall clock is
// the only non-deterministic field; callers that need byte-identical output
// across runs compare everything except elapsed_seconds.
class ReportEnvelope {
public:
    explicit ReportEnvelope(ordered_json config)
        : config_(std::move(config)),
          start_(std::chrono::steady_clock::now()) {}

    ordered_json finish(ordered_json payload) const {
        const auto end = std::chrono::steady_clock::now();
        ordered_json j;
        j["version"] = kToolVersion;
        j["config"] = config_;
        j["report"] = std::move(payload);
        j["elapsed_seconds"] =
            std::chrono::duration<double>(end - start_).count();
        return j;
    }

private:
    ordered_json config_;
    std::chrono::steady_clock::time_point start_;
};

// Copy with the wall-clock field zeroed; the byte-identity self-test hashes
// this view, everything else must match exactly.
inline ordered_json without_wall_clock(ordered_json j) {
    if (j.contains("elapsed_seconds")) j["elapsed_seconds"] = 0.0;
    return j;
}

}  // namespace hdx
