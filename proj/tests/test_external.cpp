#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>

#include "support.hpp"

#include "condsweep/encoder.hpp"
#include "condsweep/external.hpp"
#include "condsweep/isosurface.hpp"
#include "condsweep/meshtopo.hpp"
#include "condsweep/pointcloud.hpp"
#include "condsweep/sweep.hpp"

using namespace condsweep;

namespace {

std::string mock_command(const std::string& args = "")
{
    std::string cmd = std::string("'") + CONDSWEEP_MOCK_BACKEND + "'";
    return args.empty() ? cmd : cmd + " " + args;
}

std::unique_ptr<ExternalBackend> mock(const std::string& args = "", double timeout = 10.0)
{
    BackendConfig cfg;
    cfg.id = "external";
    cfg.command = mock_command(args);
    cfg.timeout_seconds = timeout;
    return connect_external(cfg);
}

PointCloud small_cloud(std::size_t n)
{
    PointCloud c = fibonacci_sphere(n);
    for (auto& p : c.points) {
        p *= 0.7;
    }
    c.on_unit_sphere = false;
    return c;
}

}  // namespace

TEST_CASE("base64 follows the standard alphabet with padding")
{
    auto enc = [](const std::string& s) {
        return wire::base64_encode({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
    };
    CHECK(enc("") == "");
    CHECK(enc("f") == "Zg==");
    CHECK(enc("fo") == "Zm8=");
    CHECK(enc("foo") == "Zm9v");
    CHECK(enc("foobar") == "Zm9vYmFy");
    const auto back = wire::base64_decode("Zm9vYmE=");
    CHECK(std::string(back.begin(), back.end()) == "fooba");
    CHECK_ERROR_CODE(wire::base64_decode("Zm9"), ErrorCode::ProtocolError);
    CHECK_ERROR_CODE(wire::base64_decode("Zm9*"), ErrorCode::ProtocolError);
}

TEST_CASE("float payloads are little-endian and round trip bit-exactly")
{
    const float one = 1.0f;
    CHECK(wire::encode_floats(std::span<const float>(&one, 1)) == "AACAPw==");

    testing::Gen gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<float> v(testing::index_in(gen, 0, 300));
        for (auto& x : v) {
            std::uint32_t bits = static_cast<std::uint32_t>(gen());
            std::memcpy(&x, &bits, 4);
        }
        const auto back = wire::decode_floats(wire::encode_floats(v));
        REQUIRE(back.size() == v.size());
        CHECK(std::memcmp(back.data(), v.data(), 4 * v.size()) == 0);
    }
    CHECK_ERROR_CODE(wire::decode_floats("AACA"), ErrorCode::ProtocolError);
}

TEST_CASE("handshake reports the mock configuration")
{
    auto b = mock();
    CHECK(b->info().name == "mock");
    CHECK(b->declared_cond_dim() == 64);
    CHECK_FALSE(b->concurrent());
    REQUIRE(b->reported_weight_count().has_value());
    CHECK(*b->reported_weight_count() == 1000000000u);
    CHECK(b->backend_id() == "external");
}

TEST_CASE("remote encode matches the echo golden")
{
    auto b = mock();
    const PointCloud cloud = small_cloud(30);
    const ConditionVector c = b->encode(cloud);
    REQUIRE(c.dim() == 64);
    CHECK(c.encoder_id == "external");
    for (std::size_t i = 0; i < 64; ++i) {
        const double want = i < 90 ? static_cast<double>(static_cast<float>(cloud.points[i / 3][static_cast<int>(i % 3)])) : 0.0;
        CHECK(c.values[i] == want);
    }
    const PointCloud few = small_cloud(5);
    const ConditionVector p = b->encode(few);
    for (std::size_t i = 15; i < 64; ++i) {
        CHECK(p.values[i] == 0.0);
    }
    const ConditionVector again = b->encode(cloud);
    CHECK(again.values == c.values);
}

TEST_CASE("server errors map to BackendError")
{
    auto b = mock();
    CHECK_ERROR_CODE(b->encode(PointCloud{}), ErrorCode::BackendError);
    try {
        b->encode(PointCloud{});
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("empty point cloud") != std::string::npos);
    }

    ConditionVector c;
    c.values.assign(64, 0.5);
    CHECK_ERROR_CODE(b->decode_checked(c, 42, default_grid(200)), ErrorCode::BackendError);

    auto failing = mock("--mode error");
    CHECK_ERROR_CODE(failing->encode(small_cloud(10)), ErrorCode::BackendError);
}

TEST_CASE("remote decode yields a sphere that extracts cleanly")
{
    auto b = mock();
    ConditionVector c;
    c.values.assign(64, 0.0);
    c.values[0] = 0.5;
    c.encoder_id = "external";
    const GridSpec spec = default_grid(32);
    const ScalarGrid g = decode(*b, c, 42, spec);
    REQUIRE(g.values.size() == spec.voxel_count());
    const double expected = spec.center(3, 17, 9).norm() - 0.55;
    CHECK(g.at(3, 17, 9) == doctest::Approx(expected).epsilon(1e-6));

    const TriangleMesh m = weld(marching_cubes(g), 0.0);
    CHECK(connected_components(m) == 1);
    CHECK(is_watertight(m));
    CHECK(euler_characteristic(m) == 2);

    const ScalarGrid again = decode(*b, c, 42, spec);
    CHECK(std::memcmp(again.values.data(), g.values.data(), 4 * g.values.size()) == 0);

    ConditionVector wrong;
    wrong.values.assign(10, 0.0);
    CHECK_ERROR_CODE(decode(*b, wrong, 42, spec), ErrorCode::DimMismatch);
}

TEST_CASE("malformed replies are protocol errors")
{
    auto garbage = mock("--mode garbage");
    CHECK_ERROR_CODE(garbage->encode(small_cloud(10)), ErrorCode::ProtocolError);

    auto short_grid = mock("--mode bad-size");
    ConditionVector c;
    c.values.assign(64, 0.1);
    CHECK_ERROR_CODE(short_grid->decode_checked(c, 42, default_grid(16)), ErrorCode::ProtocolError);
}

TEST_CASE("a silent server times out as BackendUnavailable")
{
    auto b = mock("--mode hang", 0.3);
    CHECK_ERROR_CODE(b->encode(small_cloud(10)), ErrorCode::BackendUnavailable);
}

TEST_CASE("unreachable backends are BackendUnavailable")
{
    BackendConfig cfg;
    cfg.id = "external";
    cfg.command = "exit 0";
    cfg.timeout_seconds = 2.0;
    CHECK_ERROR_CODE(connect_external(cfg), ErrorCode::BackendUnavailable);

    BackendConfig tcp;
    tcp.id = "external";
    tcp.address = "127.0.0.1:1";
    tcp.timeout_seconds = 2.0;
    CHECK_ERROR_CODE(connect_external(tcp), ErrorCode::BackendUnavailable);

    CHECK_ERROR_CODE(connect_external(BackendConfig{.id = "external"}), ErrorCode::InvalidArgument);
}

TEST_CASE("TCP transport serves the same protocol")
{
    FILE* server = ::popen((mock_command("--listen 0")).c_str(), "r");
    REQUIRE(server != nullptr);
    char line[64] = {};
    REQUIRE(std::fgets(line, sizeof(line), server) != nullptr);
    int port = 0;
    REQUIRE(std::sscanf(line, "PORT %d", &port) == 1);
    {
        BackendConfig cfg;
        cfg.id = "external";
        cfg.address = "127.0.0.1:" + std::to_string(port);
        auto b = connect_external(cfg);
        CHECK(b->declared_cond_dim() == 64);
        const ConditionVector c = b->encode(small_cloud(40));
        CHECK(c.values[0] == static_cast<double>(static_cast<float>(small_cloud(40).points[0].x())));
    }
    CHECK(::pclose(server) == 0);
}

TEST_CASE("sweep through a density-mirroring server reproduces the in-process CSV")
{
    SweepConfig cfg;
    cfg.n = 400;
    cfg.steps = 24;
    cfg.grid = default_grid(24);
    cfg.threads = 2;
    cfg.backend.tau = 0.35;

    std::ostringstream local;
    write_sweep_csv(local, run_sweep(cfg));

    SweepConfig remote = cfg;
    remote.backend.id = "external";
    remote.backend.command = mock_command("--mode mirror-density --grid 24 --tau 0.35");
    std::ostringstream through;
    write_sweep_csv(through, run_sweep(remote));

    CHECK(local.str() == through.str());
}
