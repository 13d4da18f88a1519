#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "condsweep/generator.hpp"

namespace condsweep {

/// Newline-delimited message channel to an external generator.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send_line(const std::string& line) = 0;
    /// Throws BackendUnavailable on timeout or end of stream.
    virtual std::string receive_line(double timeout_seconds) = 0;
};

/// Runs `command` under /bin/sh and talks over its stdin/stdout.
std::unique_ptr<Transport> spawn_transport(const std::string& command);

/// Connects to "host:port".
std::unique_ptr<Transport> connect_transport(const std::string& address, double timeout_seconds);

struct BackendInfo {
    std::string name;
    std::size_t cond_dim = 0;
    std::optional<std::uint64_t> weight_count;
    bool concurrent = false;
};

/// Client side of the external generator protocol. One request is in flight
/// per connection; calls from several threads are serialized.
///
///   {"op":"hello"} -> {"name", "cond_dim", "weight_count", "concurrent"}
///   {"op":"encode","points":b64,"count":N} -> {"cond":b64,"dim":C}
///   {"op":"decode","cond":b64,"seed":S,"resolution":G,"bounds":[lo..., hi...]}
///       -> {"sdf":b64,"resolution":G}
/// Arrays are little-endian float32 in base64; a reply {"error":msg} is a
/// server-side failure.
class ExternalBackend final : public GeneratorBackend {
public:
    ExternalBackend(std::unique_ptr<Transport> transport, double timeout_seconds = 30.0);

    const BackendInfo& info() const noexcept { return info_; }

    std::string backend_id() const override { return "external"; }
    std::size_t declared_cond_dim() const override { return info_.cond_dim; }
    std::optional<std::uint64_t> reported_weight_count() const override { return info_.weight_count; }
    bool concurrent() const override { return info_.concurrent; }

    ConditionVector encode(const PointCloud& cloud) override;
    ScalarGrid decode_checked(const ConditionVector& c, std::uint64_t seed, const GridSpec& spec) override;

private:
    std::string round_trip(const std::string& request);

    std::unique_ptr<Transport> transport_;
    double timeout_seconds_;
    BackendInfo info_;
    std::mutex mutex_;
};

std::unique_ptr<ExternalBackend> connect_external(const BackendConfig& config);

namespace wire {

std::string base64_encode(std::span<const unsigned char> bytes);
/// Throws ProtocolError on malformed input.
std::vector<unsigned char> base64_decode(std::string_view text);

std::string encode_floats(std::span<const float> values);
std::vector<float> decode_floats(std::string_view text);

}  // namespace wire

}  // namespace condsweep
