#include <specbounds/error.hpp>
#include <specbounds/mesh.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace specbounds {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line, const std::string& what)
{
    throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string strip_comment(const std::string& line)
{
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_double(const std::string& token, const std::filesystem::path& path, int line)
{
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) parse_fail(path, line, "bad number '" + token + "'");
    return value;
}

long parse_int(const std::string& token, const std::filesystem::path& path, int line)
{
    long value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) parse_fail(path, line, "bad integer '" + token + "'");
    return value;
}

TriMesh read_off(std::istream& in, const std::filesystem::path& path, const ValidationOptions& options)
{
    std::vector<std::string> tokens;
    std::vector<int> token_line;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(strip_comment(line));
        std::string tok;
        while (ls >> tok) {
            tokens.push_back(tok);
            token_line.push_back(line_no);
        }
    }
    std::size_t pos = 0;
    auto next = [&](const char* what) -> const std::string& {
        if (pos >= tokens.size()) parse_fail(path, line_no, std::string("unexpected end of file, expected ") + what);
        return tokens[pos++];
    };
    auto where = [&]() { return pos == 0 ? 1 : token_line[pos - 1]; };

    std::string header = next("OFF header");
    if (header != "OFF") parse_fail(path, where(), "missing OFF header");
    const long nv = parse_int(next("vertex count"), path, where());
    const long nf = parse_int(next("face count"), path, where());
    parse_int(next("edge count"), path, where());
    if (nv <= 0 || nf <= 0) parse_fail(path, where(), "vertex and face counts must be positive");

    std::vector<Vec3> vertices(nv);
    for (long v = 0; v < nv; ++v) {
        for (int k = 0; k < 3; ++k) vertices[v][k] = parse_double(next("coordinate"), path, where());
    }
    std::vector<Face> faces(nf);
    for (long f = 0; f < nf; ++f) {
        const long arity = parse_int(next("face arity"), path, where());
        if (arity != 3) parse_fail(path, where(), "only triangles are supported (face arity " + std::to_string(arity) + ")");
        for (int k = 0; k < 3; ++k) {
            const long idx = parse_int(next("face index"), path, where());
            if (idx < 0 || idx >= nv) parse_fail(path, where(), "face index " + std::to_string(idx) + " out of range");
            faces[f][k] = static_cast<int>(idx);
        }
        // Optional per-face colour values on the same line are ignored.
        const int face_line = where();
        while (pos < tokens.size() && token_line[pos] == face_line) ++pos;
    }
    return TriMesh::create(std::move(vertices), std::move(faces), options);
}

TriMesh read_obj(std::istream& in, const std::filesystem::path& path, const ValidationOptions& options)
{
    std::vector<Vec3> vertices;
    std::vector<std::array<long, 3>> raw_faces;
    std::vector<int> face_lines;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(strip_comment(line));
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                if (!(ls >> tok)) parse_fail(path, line_no, "vertex needs three coordinates");
                p[k] = parse_double(tok, path, line_no);
            }
            vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<long> idx;
            std::string tok;
            while (ls >> tok) {
                const std::string head = tok.substr(0, tok.find('/'));
                long i = parse_int(head, path, line_no);
                if (i < 0) i = static_cast<long>(vertices.size()) + i + 1;
                idx.push_back(i - 1);
            }
            if (idx.size() != 3) {
                parse_fail(path, line_no, "only triangles are supported (face with " + std::to_string(idx.size()) + " vertices)");
            }
            raw_faces.push_back({idx[0], idx[1], idx[2]});
            face_lines.push_back(line_no);
        }
        // Normals, texture coordinates, groups and materials are ignored.
    }
    if (vertices.empty() || raw_faces.empty()) parse_fail(path, line_no, "no vertices or faces");
    std::vector<Face> faces;
    faces.reserve(raw_faces.size());
    for (std::size_t f = 0; f < raw_faces.size(); ++f) {
        Face t;
        for (int k = 0; k < 3; ++k) {
            const long i = raw_faces[f][k];
            if (i < 0 || i >= static_cast<long>(vertices.size())) {
                parse_fail(path, face_lines[f], "face index out of range");
            }
            t[k] = static_cast<int>(i);
        }
        faces.push_back(t);
    }
    return TriMesh::create(std::move(vertices), std::move(faces), options);
}

} // namespace

MeshFormat format_from_path(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") return MeshFormat::Off;
    if (ext == ".obj") return MeshFormat::Obj;
    throw Error(ErrorKind::Parse, "unrecognised mesh extension '" + ext + "' (expected .off or .obj)");
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format, const ValidationOptions& options)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return format == MeshFormat::Off ? read_off(in, path, options) : read_obj(in, path, options);
}

TriMesh load_mesh(const std::filesystem::path& path, const ValidationOptions& options)
{
    return load_mesh(path, format_from_path(path), options);
}

void save_off(const TriMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << ' ' << mesh.edge_count() << '\n';
    char buf[128];
    for (const auto& p : mesh.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        out << buf;
    }
    for (const auto& t : mesh.faces()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

} // namespace specbounds
