#include "fsqtt/io.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace fsqtt {

namespace {

constexpr const char* kMagic = "fsqtt-tt";
constexpr int kVersion = 1;

void put_double(std::ostream& os, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

double get_double(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw FormatError("truncated core data");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t(buf[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

void put_list(std::ostream& os, const char* key, const std::vector<Index>& v) {
    os << key;
    for (Index x : v) os << ' ' << x;
    os << '\n';
}

std::vector<Index> get_list(std::istream& is, const char* key, std::size_t count) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError(std::string("missing header line '") + key + "'");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw FormatError(std::string("expected '") + key + "', found '" + k + "'");
    std::vector<Index> v(count);
    for (auto& x : v)
        if (!(ls >> x)) throw FormatError(std::string("short list for '") + key + "'");
    std::string extra;
    if (ls >> extra) throw FormatError(std::string("trailing values for '") + key + "'");
    return v;
}

std::string get_value(std::istream& is, const char* key) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError(std::string("missing header line '") + key + "'");
    std::istringstream ls(line);
    std::string k, v;
    ls >> k >> v;
    if (k != key || v.empty()) throw FormatError(std::string("malformed header line '") + line + "'");
    return v;
}

void write_body(std::ostream& os, const TTVector& x) {
    put_list(os, "ranks", x.ranks());
    os << "data " << x.parameter_count() << '\n';
    for (const Core& c : x.cores())
        for (double v : c.data) put_double(os, v);
    if (!os) throw FormatError("write failed");
}

std::vector<Core> read_cores(std::istream& is, const std::vector<Index>& modes) {
    const std::size_t d = modes.size();
    const std::vector<Index> ranks = get_list(is, "ranks", d + 1);
    const std::size_t count = std::stoull(get_value(is, "data"));
    std::size_t expected = 0;
    for (std::size_t k = 0; k < d; ++k) expected += ranks[k] * modes[k] * ranks[k + 1];
    if (count != expected) throw FormatError("data count does not match the rank chain");
    std::vector<Core> cores;
    cores.reserve(d);
    for (std::size_t k = 0; k < d; ++k) {
        Core c(ranks[k], modes[k], ranks[k + 1]);
        for (double& v : c.data) v = get_double(is);
        cores.push_back(std::move(c));
    }
    return cores;
}

}  // namespace

void write_tt(std::ostream& os, const TTVector& x) {
    os << kMagic << ' ' << kVersion << '\n' << "kind vector\n" << "d " << x.dim() << '\n';
    put_list(os, "modes", x.modes());
    write_body(os, x);
}

void write_tt(std::ostream& os, const TTMatrix& a) {
    os << kMagic << ' ' << kVersion << '\n' << "kind matrix\n" << "d " << a.dim() << '\n';
    put_list(os, "rows", a.row_sizes());
    put_list(os, "cols", a.col_sizes());
    write_body(os, a.flat());
}

TTObject read_tt(std::istream& is) {
    std::string magic;
    int version = 0;
    std::string line;
    if (!std::getline(is, line)) throw FormatError("empty input");
    std::istringstream(line) >> magic >> version;
    if (magic != kMagic) throw FormatError("not a TT container");
    if (version != kVersion) throw FormatError("unsupported container version " + std::to_string(version));
    const std::string kind = get_value(is, "kind");
    const std::size_t d = std::stoull(get_value(is, "d"));
    if (d == 0) throw FormatError("zero cores");
    if (kind == "vector") {
        const std::vector<Index> modes = get_list(is, "modes", d);
        return TTVector(read_cores(is, modes));
    }
    if (kind == "matrix") {
        const std::vector<Index> rows = get_list(is, "rows", d);
        const std::vector<Index> cols = get_list(is, "cols", d);
        std::vector<Index> merged(d);
        for (std::size_t k = 0; k < d; ++k) merged[k] = rows[k] * cols[k];
        return TTMatrix(rows, cols, read_cores(is, merged));
    }
    throw FormatError("unknown kind '" + kind + "'");
}

namespace {

template <class T>
void save_impl(const std::filesystem::path& path, const T& obj) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    write_tt(os, obj);
}

}  // namespace

void save(const std::filesystem::path& path, const TTVector& x) { save_impl(path, x); }
void save(const std::filesystem::path& path, const TTMatrix& a) { save_impl(path, a); }

TTObject load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    return read_tt(is);
}

TTVector load_vector(const std::filesystem::path& path) {
    TTObject obj = load(path);
    if (auto* v = std::get_if<TTVector>(&obj)) return std::move(*v);
    throw FormatError(path.string() + " holds a matrix, not a vector");
}

TTMatrix load_matrix(const std::filesystem::path& path) {
    TTObject obj = load(path);
    if (auto* m = std::get_if<TTMatrix>(&obj)) return std::move(*m);
    throw FormatError(path.string() + " holds a vector, not a matrix");
}

}  // namespace fsqtt
