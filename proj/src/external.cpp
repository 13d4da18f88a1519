#include "condsweep/external.hpp"

#include <array>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "condsweep/binary.hpp"
#include "condsweep/errors.hpp"

namespace condsweep {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string truncate(const std::string& text, std::size_t limit = 200)
{
    return text.size() <= limit ? text : text.substr(0, limit) + "...";
}

/// Reads newline-terminated lines from a nonblocking-polled descriptor.
class LineReader {
public:
    explicit LineReader(int fd) : fd_(fd) {}

    std::string next(double timeout_seconds)
    {
        const auto deadline = Clock::now() + std::chrono::duration<double>(timeout_seconds);
        for (;;) {
            const auto newline = buffer_.find('\n');
            if (newline != std::string::npos) {
                std::string line = buffer_.substr(0, newline);
                buffer_.erase(0, newline + 1);
                return line;
            }
            const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
            if (remaining.count() <= 0) {
                throw Error(ErrorCode::BackendUnavailable, "external backend: timed out waiting for a reply");
            }
            pollfd p{fd_, POLLIN, 0};
            const int ready = ::poll(&p, 1, static_cast<int>(remaining.count()));
            if (ready < 0 && errno == EINTR) {
                continue;
            }
            if (ready <= 0) {
                throw Error(ErrorCode::BackendUnavailable, "external backend: timed out waiting for a reply");
            }
            std::array<char, 65536> chunk{};
            const ssize_t got = ::read(fd_, chunk.data(), chunk.size());
            if (got < 0 && errno == EINTR) {
                continue;
            }
            if (got <= 0) {
                throw Error(ErrorCode::BackendUnavailable, "external backend: connection closed");
            }
            buffer_.append(chunk.data(), static_cast<std::size_t>(got));
        }
    }

private:
    int fd_;
    std::string buffer_;
};

void write_all(int fd, const std::string& data, bool socket)
{
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = socket ? ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL)
                                 : ::write(fd, data.data() + sent, data.size() - sent);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            throw Error(ErrorCode::BackendUnavailable,
                        std::string("external backend: write failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

class SubprocessTransport final : public Transport {
public:
    explicit SubprocessTransport(const std::string& command)
    {
        std::signal(SIGPIPE, SIG_IGN);
        int to_child[2];
        int from_child[2];
        if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
            throw Error(ErrorCode::BackendUnavailable, "external backend: pipe() failed");
        }
        pid_ = ::fork();
        if (pid_ < 0) {
            throw Error(ErrorCode::BackendUnavailable, "external backend: fork() failed");
        }
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
        ::fcntl(write_fd_, F_SETFD, FD_CLOEXEC);
        ::fcntl(read_fd_, F_SETFD, FD_CLOEXEC);
        reader_ = std::make_unique<LineReader>(read_fd_);
    }

    ~SubprocessTransport() override
    {
        ::close(write_fd_);
        ::close(read_fd_);
        // Give a well-behaved server a moment to exit on EOF before terminating it.
        for (int i = 0; i < 50; ++i) {
            int status = 0;
            if (::waitpid(pid_, &status, WNOHANG) == pid_) {
                return;
            }
            ::usleep(2000);
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, nullptr, 0);
    }

    void send_line(const std::string& line) override { write_all(write_fd_, line + "\n", false); }

    std::string receive_line(double timeout_seconds) override { return reader_->next(timeout_seconds); }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
    std::unique_ptr<LineReader> reader_;
};

class TcpTransport final : public Transport {
public:
    TcpTransport(const std::string& address, double timeout_seconds)
    {
        const auto colon = address.rfind(':');
        if (colon == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "external backend: address must be host:port");
        }
        const std::string host = address.substr(0, colon);
        const std::string port = address.substr(colon + 1);
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* found = nullptr;
        if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &found) != 0 || found == nullptr) {
            throw Error(ErrorCode::BackendUnavailable, "external backend: cannot resolve " + address);
        }
        for (addrinfo* ai = found; ai != nullptr && fd_ < 0; ai = ai->ai_next) {
            fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd_ < 0) {
                continue;
            }
            if (connect_with_timeout(fd_, ai, timeout_seconds)) {
                break;
            }
            ::close(fd_);
            fd_ = -1;
        }
        ::freeaddrinfo(found);
        if (fd_ < 0) {
            throw Error(ErrorCode::BackendUnavailable, "external backend: cannot connect to " + address);
        }
        reader_ = std::make_unique<LineReader>(fd_);
    }

    ~TcpTransport() override
    {
        if (fd_ >= 0) {
            ::close(fd_);
        }
    }

    void send_line(const std::string& line) override { write_all(fd_, line + "\n", true); }

    std::string receive_line(double timeout_seconds) override { return reader_->next(timeout_seconds); }

private:
    static bool connect_with_timeout(int fd, const addrinfo* ai, double timeout_seconds)
    {
        const int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            pollfd p{fd, POLLOUT, 0};
            rc = ::poll(&p, 1, static_cast<int>(timeout_seconds * 1000.0)) == 1 ? 0 : -1;
            if (rc == 0) {
                int err = 0;
                socklen_t len = sizeof(err);
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                rc = err == 0 ? 0 : -1;
            }
        }
        ::fcntl(fd, F_SETFL, flags);
        return rc == 0;
    }

    int fd_ = -1;
    std::unique_ptr<LineReader> reader_;
};

json parse_reply(const std::string& raw)
{
    json reply;
    try {
        reply = json::parse(raw);
    } catch (const json::exception&) {
        throw Error(ErrorCode::ProtocolError, "external backend: malformed reply: " + truncate(raw));
    }
    if (!reply.is_object()) {
        throw Error(ErrorCode::ProtocolError, "external backend: reply is not an object: " + truncate(raw));
    }
    if (reply.contains("error")) {
        const auto& msg = reply["error"];
        throw Error(ErrorCode::BackendError, msg.is_string() ? msg.get<std::string>() : msg.dump());
    }
    return reply;
}

template <typename T>
T require_field(const json& reply, const char* key, const std::string& raw)
{
    if (!reply.contains(key)) {
        throw Error(ErrorCode::ProtocolError,
                    std::string("external backend: reply lacks '") + key + "': " + truncate(raw));
    }
    try {
        return reply[key].get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ProtocolError,
                    std::string("external backend: reply field '") + key + "' has the wrong type: " + truncate(raw));
    }
}

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

namespace wire {

std::string base64_encode(std::span<const unsigned char> bytes)
{
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += kAlphabet[n & 63];
    }
    if (i < bytes.size()) {
        std::uint32_t n = bytes[i] << 16;
        if (i + 1 < bytes.size()) {
            n |= bytes[i + 1] << 8;
        }
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(std::string_view text)
{
    static const auto table = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        for (int c = 0; c < 64; ++c) {
            t[static_cast<unsigned char>(kAlphabet[c])] = c;
        }
        return t;
    }();
    if (text.size() % 4 != 0) {
        throw Error(ErrorCode::ProtocolError, "base64 payload length is not a multiple of 4");
    }
    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int quad[4];
        int pad = 0;
        for (int q = 0; q < 4; ++q) {
            const char ch = text[i + q];
            if (ch == '=' && i + 4 == text.size() && q >= 2) {
                quad[q] = 0;
                ++pad;
                continue;
            }
            quad[q] = table[static_cast<unsigned char>(ch)];
            if (quad[q] < 0 || pad > 0) {
                throw Error(ErrorCode::ProtocolError, "base64 payload has an invalid character");
            }
        }
        const std::uint32_t n = (quad[0] << 18) | (quad[1] << 12) | (quad[2] << 6) | quad[3];
        out.push_back(static_cast<unsigned char>(n >> 16));
        if (pad < 2) {
            out.push_back(static_cast<unsigned char>((n >> 8) & 0xFF));
        }
        if (pad < 1) {
            out.push_back(static_cast<unsigned char>(n & 0xFF));
        }
    }
    return out;
}

std::string encode_floats(std::span<const float> values)
{
    std::vector<unsigned char> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float le = binary::to_little(values[i]);
        std::memcpy(bytes.data() + 4 * i, &le, 4);
    }
    return base64_encode(bytes);
}

std::vector<float> decode_floats(std::string_view text)
{
    const std::vector<unsigned char> bytes = base64_decode(text);
    if (bytes.size() % 4 != 0) {
        throw Error(ErrorCode::ProtocolError, "float32 payload size is not a multiple of 4");
    }
    std::vector<float> values(bytes.size() / 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        float v;
        std::memcpy(&v, bytes.data() + 4 * i, 4);
        values[i] = binary::to_little(v);
    }
    return values;
}

}  // namespace wire

std::unique_ptr<Transport> spawn_transport(const std::string& command)
{
    return std::make_unique<SubprocessTransport>(command);
}

std::unique_ptr<Transport> connect_transport(const std::string& address, double timeout_seconds)
{
    return std::make_unique<TcpTransport>(address, timeout_seconds);
}

ExternalBackend::ExternalBackend(std::unique_ptr<Transport> transport, double timeout_seconds)
    : transport_(std::move(transport)), timeout_seconds_(timeout_seconds)
{
    const std::string raw = round_trip(json{{"op", "hello"}}.dump());
    const json reply = parse_reply(raw);
    info_.name = require_field<std::string>(reply, "name", raw);
    info_.cond_dim = require_field<std::size_t>(reply, "cond_dim", raw);
    if (reply.contains("weight_count") && !reply["weight_count"].is_null()) {
        info_.weight_count = require_field<std::uint64_t>(reply, "weight_count", raw);
    }
    info_.concurrent = reply.value("concurrent", false);
    if (info_.cond_dim == 0) {
        throw Error(ErrorCode::ProtocolError, "external backend: handshake declared cond_dim 0");
    }
}

std::string ExternalBackend::round_trip(const std::string& request)
{
    std::lock_guard lock(mutex_);
    transport_->send_line(request);
    return transport_->receive_line(timeout_seconds_);
}

ConditionVector ExternalBackend::encode(const PointCloud& cloud)
{
    std::vector<float> xyz;
    xyz.reserve(3 * cloud.size());
    for (const auto& p : cloud.points) {
        for (int a = 0; a < 3; ++a) {
            xyz.push_back(static_cast<float>(p[a]));
        }
    }
    const json request{{"op", "encode"}, {"points", wire::encode_floats(xyz)}, {"count", cloud.size()}};
    const std::string raw = round_trip(request.dump());
    const json reply = parse_reply(raw);
    ConditionVector c;
    c.encoder_id = "external";
    const auto cond = wire::decode_floats(require_field<std::string>(reply, "cond", raw));
    c.values.assign(cond.begin(), cond.end());
    const auto dim = require_field<std::size_t>(reply, "dim", raw);
    if (dim != c.dim()) {
        throw Error(ErrorCode::ProtocolError, "external backend: encode payload holds " + std::to_string(c.dim()) +
                                                  " values but reports dim " + std::to_string(dim));
    }
    if (dim != info_.cond_dim) {
        throw Error(ErrorCode::DimMismatch, "external backend: encode returned dim " + std::to_string(dim) +
                                                ", handshake declared " + std::to_string(info_.cond_dim));
    }
    return c;
}

ScalarGrid ExternalBackend::decode_checked(const ConditionVector& c, std::uint64_t seed, const GridSpec& spec)
{
    spec.validate();
    json bounds = json::array();
    for (int a = 0; a < 3; ++a) {
        bounds.push_back(spec.lower[a]);
    }
    for (int a = 0; a < 3; ++a) {
        bounds.push_back(spec.upper[a]);
    }
    const json request{{"op", "decode"},
                       {"cond", wire::encode_floats(std::vector<float>(c.values.begin(), c.values.end()))},
                       {"seed", seed},
                       {"resolution", spec.resolution},
                       {"bounds", bounds}};
    const std::string raw = round_trip(request.dump());
    const json reply = parse_reply(raw);
    const int resolution = require_field<int>(reply, "resolution", raw);
    ScalarGrid grid;
    grid.spec = spec;
    grid.level = 0.0;
    grid.values = wire::decode_floats(require_field<std::string>(reply, "sdf", raw));
    if (resolution != spec.resolution || grid.values.size() != spec.voxel_count()) {
        throw Error(ErrorCode::ProtocolError, "external backend: decode returned " +
                                                  std::to_string(grid.values.size()) + " samples at resolution " +
                                                  std::to_string(resolution) + ", expected " +
                                                  std::to_string(spec.voxel_count()));
    }
    return grid;
}

std::unique_ptr<ExternalBackend> connect_external(const BackendConfig& config)
{
    if (!config.command.empty()) {
        return std::make_unique<ExternalBackend>(spawn_transport(config.command), config.timeout_seconds);
    }
    if (!config.address.empty()) {
        return std::make_unique<ExternalBackend>(connect_transport(config.address, config.timeout_seconds),
                                                 config.timeout_seconds);
    }
    throw Error(ErrorCode::InvalidArgument, "external backend needs a launch command or an address");
}

}  // namespace condsweep
