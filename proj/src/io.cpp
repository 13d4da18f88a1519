#include "condsweep/io.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "condsweep/binary.hpp"
#include "condsweep/errors.hpp"

namespace condsweep {

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

[[noreturn]] void parse_error(const std::string& what, std::size_t line)
{
    throw Error(ErrorCode::ParseError, what + " (line " + std::to_string(line) + ")");
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for reading");
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    return out;
}

void expect_magic(std::istream& in, const char* magic)
{
    char got[4] = {};
    in.read(got, 4);
    if (in.gcount() != 4 || std::string(got, 4) != magic) {
        throw Error(ErrorCode::ParseError, std::string("missing ") + magic + " magic");
    }
    std::uint32_t version = 0;
    if (!binary::read(in, version) || version != 1) {
        throw Error(ErrorCode::ParseError, std::string(magic) + ": unsupported version");
    }
}

std::uint64_t read_u64(std::istream& in, const char* what)
{
    std::uint64_t v = 0;
    if (!binary::read(in, v)) {
        throw Error(ErrorCode::ParseError, std::string("truncated header: ") + what);
    }
    return v;
}

void read_floats(std::istream& in, float* dst, std::size_t n, const char* what)
{
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(n * sizeof(float))) {
        throw Error(ErrorCode::ParseError, std::string("truncated payload: ") + what);
    }
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] = binary::to_little(dst[i]);
    }
}

void write_floats(std::ostream& out, const double* src, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        binary::write(out, static_cast<float>(src[i]));
    }
}

std::vector<double> read_doubles(std::istream& in, std::size_t n, const char* what)
{
    std::vector<float> buf(n);
    read_floats(in, buf.data(), n, what);
    return {buf.begin(), buf.end()};
}

bool parse_double(const std::string& token, double& value)
{
    const char* b = token.data();
    const char* e = b + token.size();
    if (b != e && *b == '+') {
        ++b;
    }
    auto [ptr, ec] = std::from_chars(b, e, value);
    return ec == std::errc() && ptr == e;
}

std::size_t ply_type_size(const std::string& type)
{
    if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
    if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
    if (type == "int" || type == "uint" || type == "int32" || type == "uint32" || type == "float" ||
        type == "float32")
        return 4;
    if (type == "double" || type == "float64") return 8;
    return 0;
}

double ply_read_scalar(const unsigned char* p, const std::string& type)
{
    auto load = [p](auto tag) {
        decltype(tag) v;
        std::memcpy(&v, p, sizeof(v));
        return static_cast<double>(binary::to_little(v));
    };
    if (type == "char" || type == "int8") return load(std::int8_t{});
    if (type == "uchar" || type == "uint8") return load(std::uint8_t{});
    if (type == "short" || type == "int16") return load(std::int16_t{});
    if (type == "ushort" || type == "uint16") return load(std::uint16_t{});
    if (type == "int" || type == "int32") return load(std::int32_t{});
    if (type == "uint" || type == "uint32") return load(std::uint32_t{});
    if (type == "float" || type == "float32") return load(float{});
    return load(double{});
}

}  // namespace

void write_xyz(std::ostream& out, const PointCloud& cloud)
{
    char buf[96];
    for (const auto& p : cloud.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        out << buf;
    }
}

PointCloud read_xyz(std::istream& in)
{
    PointCloud cloud;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string tok[3];
        std::string extra;
        Vec3 p;
        if (!(fields >> tok[0] >> tok[1] >> tok[2]) || (fields >> extra)) {
            parse_error("expected three coordinates", number);
        }
        for (int a = 0; a < 3; ++a) {
            if (!parse_double(tok[a], p[a])) {
                parse_error("malformed coordinate '" + tok[a] + "'", number);
            }
        }
        cloud.points.push_back(p);
    }
    bool unit = !cloud.empty();
    for (const auto& p : cloud.points) {
        unit = unit && std::abs(p.norm() - 1.0) <= 1e-9;
    }
    cloud.on_unit_sphere = unit;
    return cloud;
}

void write_ply(std::ostream& out, const PointCloud& cloud)
{
    out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    for (const auto& p : cloud.points) {
        for (int a = 0; a < 3; ++a) {
            binary::write(out, static_cast<float>(p[a]));
        }
    }
}

PointCloud read_ply(std::istream& in)
{
    std::string line;
    std::size_t number = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) {
            throw Error(ErrorCode::ParseError, "ply: unexpected end of header");
        }
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
    };
    next_line();
    if (line != "ply") {
        parse_error("ply: missing magic", number);
    }
    std::size_t vertex_count = 0;
    bool in_vertex = false;
    bool seen_vertex = false;
    struct Property {
        std::string type;
        std::string name;
    };
    std::vector<Property> props;
    for (;;) {
        next_line();
        std::istringstream fields(line);
        std::string keyword;
        fields >> keyword;
        if (keyword == "end_header") {
            break;
        }
        if (keyword == "format") {
            std::string fmt;
            fields >> fmt;
            if (fmt != "binary_little_endian") {
                parse_error("ply: only binary_little_endian is supported", number);
            }
        } else if (keyword == "element") {
            std::string name;
            fields >> name;
            in_vertex = name == "vertex";
            if (in_vertex) {
                if (!(fields >> vertex_count)) {
                    parse_error("ply: malformed vertex count", number);
                }
                seen_vertex = true;
            } else if (!seen_vertex) {
                parse_error("ply: vertex element must come first", number);
            }
        } else if (keyword == "property" && in_vertex) {
            Property p;
            fields >> p.type >> p.name;
            if (p.type == "list" || ply_type_size(p.type) == 0) {
                parse_error("ply: unsupported vertex property type '" + p.type + "'", number);
            }
            props.push_back(p);
        } else if (keyword != "comment" && keyword != "obj_info" && keyword != "property") {
            parse_error("ply: unknown header line", number);
        }
    }
    int slot[3] = {-1, -1, -1};
    std::size_t stride = 0;
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < props.size(); ++i) {
        offsets.push_back(stride);
        stride += ply_type_size(props[i].type);
        for (int a = 0; a < 3; ++a) {
            if (props[i].name == std::string(1, static_cast<char>('x' + a))) {
                slot[a] = static_cast<int>(i);
            }
        }
    }
    if (slot[0] < 0 || slot[1] < 0 || slot[2] < 0) {
        throw Error(ErrorCode::ParseError, "ply: vertex element lacks x, y or z");
    }
    PointCloud cloud;
    cloud.points.reserve(vertex_count);
    std::vector<unsigned char> record(stride);
    for (std::size_t v = 0; v < vertex_count; ++v) {
        in.read(reinterpret_cast<char*>(record.data()), static_cast<std::streamsize>(stride));
        if (in.gcount() != static_cast<std::streamsize>(stride)) {
            throw Error(ErrorCode::ParseError, "ply: truncated vertex data");
        }
        Vec3 p;
        for (int a = 0; a < 3; ++a) {
            const auto i = static_cast<std::size_t>(slot[a]);
            p[a] = ply_read_scalar(record.data() + offsets[i], props[i].type);
        }
        cloud.points.push_back(p);
    }
    return cloud;
}

PointCloud read_point_cloud_file(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return path.extension() == ".ply" ? read_ply(in) : read_xyz(in);
}

void write_point_cloud_file(const std::filesystem::path& path, const PointCloud& cloud)
{
    auto out = open_out(path);
    if (path.extension() == ".ply") {
        write_ply(out, cloud);
    } else {
        write_xyz(out, cloud);
    }
}

void write_obj(std::ostream& out, const TriangleMesh& mesh)
{
    char buf[96];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& t : mesh.triangles) {
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

TriangleMesh read_obj(std::istream& in)
{
    TriangleMesh mesh;
    std::string line;
    std::size_t number = 0;
    struct PendingFace {
        std::vector<long long> idx;
        std::size_t line;
    };
    std::vector<PendingFace> faces;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream fields(line);
        std::string keyword;
        if (!(fields >> keyword)) {
            continue;
        }
        if (keyword == "v") {
            std::string tok[3];
            Vec3 p;
            if (!(fields >> tok[0] >> tok[1] >> tok[2])) {
                parse_error("obj: vertex needs three coordinates", number);
            }
            for (int a = 0; a < 3; ++a) {
                if (!parse_double(tok[a], p[a])) {
                    parse_error("obj: malformed coordinate '" + tok[a] + "'", number);
                }
            }
            mesh.vertices.push_back(p);
        } else if (keyword == "f") {
            PendingFace face{{}, number};
            std::string tok;
            while (fields >> tok) {
                const std::string head = tok.substr(0, tok.find('/'));
                long long idx = 0;
                auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
                if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
                    parse_error("obj: malformed face index '" + tok + "'", number);
                }
                // Negative indices count back from the most recent vertex.
                face.idx.push_back(idx > 0 ? idx - 1 : static_cast<long long>(mesh.vertices.size()) + idx);
            }
            if (face.idx.size() < 3) {
                parse_error("obj: face needs at least three vertices", number);
            }
            faces.push_back(std::move(face));
        }
    }
    for (const auto& face : faces) {
        for (long long idx : face.idx) {
            if (idx < 0 || idx >= static_cast<long long>(mesh.vertices.size())) {
                parse_error("obj: face index out of range", face.line);
            }
        }
        for (std::size_t i = 1; i + 1 < face.idx.size(); ++i) {
            mesh.triangles.push_back({static_cast<std::uint32_t>(face.idx[0]),
                                      static_cast<std::uint32_t>(face.idx[i]),
                                      static_cast<std::uint32_t>(face.idx[i + 1])});
        }
    }
    return mesh;
}

void write_obj_file(const std::filesystem::path& path, const TriangleMesh& mesh)
{
    auto out = open_out(path);
    write_obj(out, mesh);
}

TriangleMesh read_obj_file(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_obj(in);
}

void write_cvec(std::ostream& out, const ConditionVector& c)
{
    out.write("CVEC", 4);
    binary::write<std::uint32_t>(out, 1);
    binary::write<std::uint64_t>(out, c.dim());
    write_floats(out, c.values.data(), c.dim());
}

ConditionVector read_cvec(std::istream& in, const std::string& encoder_id)
{
    expect_magic(in, "CVEC");
    const std::uint64_t dim = read_u64(in, "dim");
    ConditionVector c;
    c.encoder_id = encoder_id;
    c.values = read_doubles(in, dim, "CVEC values");
    return c;
}

void write_cvbt(std::ostream& out, const std::vector<ConditionVector>& batch)
{
    const std::uint64_t dim = batch.empty() ? 0 : batch.front().dim();
    for (const auto& c : batch) {
        if (c.dim() != dim) {
            throw Error(ErrorCode::DimMismatch, "CVBT rows must share one dimension");
        }
    }
    out.write("CVBT", 4);
    binary::write<std::uint32_t>(out, 1);
    binary::write<std::uint64_t>(out, batch.size());
    binary::write<std::uint64_t>(out, dim);
    for (const auto& c : batch) {
        write_floats(out, c.values.data(), c.dim());
    }
}

std::vector<ConditionVector> read_cvbt(std::istream& in, const std::string& encoder_id)
{
    expect_magic(in, "CVBT");
    const std::uint64_t count = read_u64(in, "count");
    const std::uint64_t dim = read_u64(in, "dim");
    std::vector<ConditionVector> batch(count);
    for (auto& c : batch) {
        c.encoder_id = encoder_id;
        c.values = read_doubles(in, dim, "CVBT rows");
    }
    return batch;
}

std::vector<ConditionVector> read_conditions_file(const std::filesystem::path& path, const std::string& encoder_id)
{
    auto in = open_in(path);
    char magic[4] = {};
    in.read(magic, 4);
    in.seekg(0);
    if (std::string(magic, 4) == "CVBT") {
        return read_cvbt(in, encoder_id);
    }
    return {read_cvec(in, encoder_id)};
}

void write_pcam(std::ostream& out, const PcaModel& model)
{
    const std::size_t c_dim = model.cond_dim();
    const std::size_t d = model.mode_count();
    out.write("PCAM", 4);
    binary::write<std::uint32_t>(out, 1);
    binary::write<std::uint64_t>(out, c_dim);
    binary::write<std::uint64_t>(out, d);
    binary::write<std::uint64_t>(out, model.k_train);
    for (Eigen::Index i = 0; i < model.mean.size(); ++i) {
        binary::write(out, static_cast<float>(model.mean(i)));
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < c_dim; ++i) {
            binary::write(out, static_cast<float>(model.modes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        binary::write(out, static_cast<float>(model.mode_stds(static_cast<Eigen::Index>(j))));
    }
    for (std::size_t j = 0; j < d; ++j) {
        binary::write(out, static_cast<float>(model.explained(static_cast<Eigen::Index>(j))));
    }
}

PcaModel read_pcam(std::istream& in, const std::string& encoder_id)
{
    expect_magic(in, "PCAM");
    const std::uint64_t c_dim = read_u64(in, "C");
    const std::uint64_t d = read_u64(in, "d");
    const std::uint64_t k = read_u64(in, "k");
    auto load = [&](std::size_t n, const char* what) {
        std::vector<float> buf(n);
        read_floats(in, buf.data(), n, what);
        return Eigen::Map<Eigen::VectorXf>(buf.data(), static_cast<Eigen::Index>(n)).cast<double>().eval();
    };
    PcaModel model;
    model.k_train = k;
    model.encoder_id = encoder_id;
    model.mean = load(c_dim, "mean");
    const Eigen::VectorXd flat = load(c_dim * d, "modes");
    model.modes = Eigen::Map<const Eigen::MatrixXd>(flat.data(), static_cast<Eigen::Index>(c_dim),
                                                    static_cast<Eigen::Index>(d));
    model.mode_stds = load(d, "stds");
    model.explained = load(d, "explained");
    return model;
}

}  // namespace condsweep
