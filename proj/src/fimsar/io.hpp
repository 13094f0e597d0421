#pragma once

#include "fimsar/common.hpp"

#include <map>
#include <string>
#include <utility>

namespace fimsar::io {

// Complex matrix file: 8-byte magic "FIMSARCM", u32 version, u32 reserved, u64 rows, u64 cols,
// then rows*cols (re, im) float32 pairs, all little-endian.
inline constexpr char kMatrixMagic[8] = {'F', 'I', 'M', 'S', 'A', 'R', 'C', 'M'};
inline constexpr std::uint32_t kMatrixVersion = 1;

void write_matrix(const std::string& path, const CMatrix& m);
CMatrix read_matrix(const std::string& path);

/** Sidecar metadata: one `key = value` per line, keys sorted. */
using Metadata = std::map<std::string, std::string>;
void write_metadata(const std::string& path, const Metadata& meta);
Metadata read_metadata(const std::string& path);
double meta_double(const Metadata& meta, const std::string& key);
std::string meta_string(const Metadata& meta, const std::string& key);

/** Shortest text that parses back to the same double. */
std::string format_double(double v);

/**
 * 16-bit binary PGM of 20*log10(|x|/max|x|), clipped at floor_db and mapped linearly onto
 * 0..65535. Row r of `magnitude` becomes image row r.
 */
void write_pgm(const std::string& path, const std::vector<double>& magnitude, std::size_t rows, std::size_t cols,
               double floor_db = -60.0);

struct Pgm {
    std::size_t width = 0, height = 0;
    unsigned maxval = 0;
    std::vector<unsigned> pixels;
};
Pgm read_pgm(const std::string& path);

/** CSV with a mandatory header row; fields are written as given. */
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::string path_;
    std::string buffer_;
    std::size_t columns_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace fimsar::io
