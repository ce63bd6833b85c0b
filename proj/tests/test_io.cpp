#include <cstring>
#include <filesystem>
#include <sstream>

#include <doctest.h>

#include "fsqtt/constructors.hpp"
#include "fsqtt/io.hpp"
#include "test_util.hpp"

using namespace fsqtt;
using namespace fsqtt::testing;

namespace {

bool bit_equal(const TTVector& a, const TTVector& b) {
    if (a.dim() != b.dim()) return false;
    for (Index k = 0; k < a.dim(); ++k) {
        const Core &ca = a.core(k), &cb = b.core(k);
        if (ca.left != cb.left || ca.mode != cb.mode || ca.right != cb.right) return false;
        if (std::memcmp(ca.data.data(), cb.data.data(), ca.size() * sizeof(double)) != 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("vector round trip is bit exact") {
    TTVector x = random_tt({2, 3, 2, 5}, 4, 7);
    // Values that do not survive a decimal round trip.
    x = scale(1.0 / 3.0, x);
    std::stringstream ss;
    write_tt(ss, x);
    const TTObject back = read_tt(ss);
    REQUIRE(std::holds_alternative<TTVector>(back));
    CHECK(bit_equal(std::get<TTVector>(back), x));
}

TEST_CASE("matrix round trip through a file") {
    const TTMatrix a = random_tt_matrix({2, 3}, {3, 2}, 3, 9);
    const auto path = std::filesystem::temp_directory_path() / "fsqtt_io_matrix.tt";
    save(path, a);
    const TTMatrix b = load_matrix(path);
    CHECK(b.row_sizes() == a.row_sizes());
    CHECK(b.col_sizes() == a.col_sizes());
    CHECK(bit_equal(b.flat(), a.flat()));
    CHECK_THROWS_AS(load_vector(path), FormatError);
    std::filesystem::remove(path);
}

TEST_CASE("special values survive") {
    std::vector<Core> cores = {Core(1, 2, 1)};
    cores[0].data = {-0.0, 4.9406564584124654e-324};
    const TTVector x(cores);
    std::stringstream ss;
    write_tt(ss, x);
    CHECK(bit_equal(std::get<TTVector>(read_tt(ss)), x));
}

TEST_CASE("malformed input is rejected") {
    std::stringstream bad_magic("not-a-tt 1\n");
    CHECK_THROWS_AS(read_tt(bad_magic), FormatError);

    std::stringstream ss;
    write_tt(ss, qtt_ones(3));
    std::string s = ss.str();
    std::stringstream truncated(s.substr(0, s.size() - 4));
    CHECK_THROWS_AS(read_tt(truncated), FormatError);

    CHECK_THROWS_AS(load("/nonexistent/dir/x.tt"), FormatError);
}
