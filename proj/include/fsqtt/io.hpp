#pragma once

// On-disk container for TT vectors and matrices.  A short text header
//
//   fsqtt-tt 1
//   kind vector|matrix
//   d <cores>
//   modes <I_1 .. I_d>            (vectors)
//   rows <I_1 .. I_d>             (matrices)
//   cols <J_1 .. J_d>             (matrices)
//   ranks <R_0 .. R_d>
//   data <count>
//
// is followed by the cores as little-endian float64 in core order, each core
// in its native (left fastest) layout.  Loading reproduces every bit.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <variant>

#include "fsqtt/tt.hpp"

namespace fsqtt {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using TTObject = std::variant<TTVector, TTMatrix>;

void write_tt(std::ostream& os, const TTVector& x);
void write_tt(std::ostream& os, const TTMatrix& a);
TTObject read_tt(std::istream& is);

void save(const std::filesystem::path& path, const TTVector& x);
void save(const std::filesystem::path& path, const TTMatrix& a);
TTObject load(const std::filesystem::path& path);
TTVector load_vector(const std::filesystem::path& path);
TTMatrix load_matrix(const std::filesystem::path& path);

}  // namespace fsqtt
