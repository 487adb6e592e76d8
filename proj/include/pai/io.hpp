#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pai/distribution.hpp"
#include "pai/errors.hpp"
#include "pai/linear_operator.hpp"

namespace pai {

/// Fixed-width decimal rendering: scientific, 17 significant digits.
inline std::string format_probability(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

template <class S>
void write_distribution_csv(std::ostream& out, const Distribution<S>& d) {
  out << "index,probability\n";
  for (const auto& [index, mass] : d.entries())
    out << index << ',' << format_probability(scalar_traits<S>::to_double(mass)) << '\n';
}

template <class S>
void write_operator_csv(std::ostream& out, const LinearOperator<S>& op) {
  out << "row,col,value\n";
  for (const auto& t : op.entries())
    out << t.row << ',' << t.col << ','
        << format_probability(scalar_traits<S>::to_double(t.value)) << '\n';
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

inline double parse_double_field(std::string_view field, std::size_t line_no) {
  double v{};
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw ParseError("bad numeric field '" + std::string(field) + "'", line_no);
  return v;
}

inline std::size_t parse_index_field(std::string_view field, std::size_t line_no) {
  std::size_t v{};
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw ParseError("bad index field '" + std::string(field) + "'", line_no);
  return v;
}

}  // namespace detail

template <class S>
Distribution<S> read_distribution_csv(std::istream& in, std::size_t domain_size) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind("index,probability", 0) != 0)
    throw ParseError("expected header 'index,probability'", line_no);
  std::vector<typename Distribution<S>::entry_type> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
    entries.emplace_back(detail::parse_index_field(fields[0], line_no),
                         scalar_traits<S>::from_double(
                             detail::parse_double_field(fields[1], line_no)));
  }
  return Distribution<S>(domain_size, std::move(entries));
}

template <class S>
LinearOperator<S> read_operator_csv(std::istream& in, std::size_t rows, std::size_t cols,
                                    OperatorRole role) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind("row,col,value", 0) != 0)
    throw ParseError("expected header 'row,col,value'", line_no);
  std::vector<Triplet<S>> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    entries.push_back({detail::parse_index_field(fields[0], line_no),
                       detail::parse_index_field(fields[1], line_no),
                       scalar_traits<S>::from_double(
                           detail::parse_double_field(fields[2], line_no))});
  }
  return LinearOperator<S>(rows, cols, std::move(entries), role);
}

template <class PartitionLike>
void write_partition_csv(std::ostream& out, const PartitionLike& p) {
  out << "concrete_index,cell_id\n";
  for (std::size_t i = 0; i < p.domain_size(); ++i) out << i << ',' << p.cell_of(i) << '\n';
}

/// FNV-1a content hash used for report provenance.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace pai
