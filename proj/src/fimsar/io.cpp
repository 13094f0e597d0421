#include "fimsar/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fimsar::io {
namespace {

template <class T>
void put_le(std::string& buf, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const char* p) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_runtime("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail_runtime("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_runtime("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_matrix(const std::string& path, const CMatrix& m) {
    std::string buf;
    buf.reserve(32 + m.data.size() * 8);
    buf.append(kMatrixMagic, 8);
    put_le<std::uint32_t>(buf, kMatrixVersion);
    put_le<std::uint32_t>(buf, 0);
    put_le<std::uint64_t>(buf, m.rows);
    put_le<std::uint64_t>(buf, m.cols);
    for (const Complex& z : m.data) {
        put_le<float>(buf, static_cast<float>(z.real()));
        put_le<float>(buf, static_cast<float>(z.imag()));
    }
    write_file(path, buf);
}

CMatrix read_matrix(const std::string& path) {
    std::string buf = read_file(path);
    if (buf.size() < 32 || std::memcmp(buf.data(), kMatrixMagic, 8) != 0)
        fail_runtime("'" + path + "' is not a complex matrix file");
    if (get_le<std::uint32_t>(buf.data() + 8) != kMatrixVersion)
        fail_runtime("'" + path + "' has an unsupported version");
    auto rows = get_le<std::uint64_t>(buf.data() + 16);
    auto cols = get_le<std::uint64_t>(buf.data() + 24);
    if (cols != 0 && rows > (buf.size() / 8) / cols) fail_runtime("'" + path + "' is truncated");
    if (buf.size() != 32 + rows * cols * 8) fail_runtime("'" + path + "' has the wrong size");
    CMatrix m(rows, cols);
    const char* p = buf.data() + 32;
    for (auto& z : m.data) {
        z = {get_le<float>(p), get_le<float>(p + 4)};
        p += 8;
    }
    return m;
}

std::string format_double(double v) {
    char tmp[64];
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
    if (ec != std::errc()) fail_runtime("number formatting failed");
    return std::string(tmp, ptr);
}

void write_metadata(const std::string& path, const Metadata& meta) {
    std::string buf;
    for (const auto& [k, v] : meta) buf += k + " = " + v + "\n";
    write_file(path, buf);
}

Metadata read_metadata(const std::string& path) {
    std::istringstream in(read_file(path));
    Metadata meta;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail_runtime("malformed metadata line in '" + path + "'");
        meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return meta;
}

std::string meta_string(const Metadata& meta, const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) fail_runtime("metadata key '" + key + "' missing");
    return it->second;
}

double meta_double(const Metadata& meta, const std::string& key) {
    std::string v = meta_string(meta, key);
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail_runtime("metadata key '" + key + "' is not a number");
    return out;
}

void write_pgm(const std::string& path, const std::vector<double>& magnitude, std::size_t rows, std::size_t cols,
               double floor_db) {
    if (magnitude.size() != rows * cols) fail_invalid("image size mismatch");
    if (!(floor_db < 0)) fail_invalid("dB floor must be negative");
    double peak = 0;
    for (double v : magnitude) peak = std::max(peak, v);
    std::string buf = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
    buf.reserve(buf.size() + magnitude.size() * 2);
    for (double v : magnitude) {
        double db = (peak > 0 && v > 0) ? 20.0 * std::log10(v / peak) : floor_db;
        db = std::clamp(db, floor_db, 0.0);
        auto level = static_cast<unsigned>(std::lround((db - floor_db) / -floor_db * 65535.0));
        buf.push_back(static_cast<char>((level >> 8) & 0xFF));   // PGM samples are big-endian
        buf.push_back(static_cast<char>(level & 0xFF));
    }
    write_file(path, buf);
}

Pgm read_pgm(const std::string& path) {
    std::string buf = read_file(path);
    std::istringstream in(buf);
    std::string magic;
    Pgm img;
    in >> magic >> img.width >> img.height >> img.maxval;
    if (!in || (magic != "P5" && magic != "P2")) fail_runtime("'" + path + "' is not a PGM file");
    std::size_t n = img.width * img.height;
    img.pixels.resize(n);
    if (magic == "P2") {
        for (auto& v : img.pixels) in >> v;
        if (!in) fail_runtime("'" + path + "' is truncated");
        return img;
    }
    in.get();
    auto off = static_cast<std::size_t>(in.tellg());
    std::size_t bps = img.maxval > 255 ? 2 : 1;
    if (buf.size() < off + n * bps) fail_runtime("'" + path + "' is truncated");
    for (std::size_t i = 0; i < n; ++i) {
        auto hi = static_cast<unsigned char>(buf[off + i * bps]);
        img.pixels[i] = bps == 2 ? (hi << 8) | static_cast<unsigned char>(buf[off + i * bps + 1]) : hi;
    }
    return img;
}

namespace {

std::string csv_field(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) fail_invalid("CSV row has the wrong number of fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += csv_field(fields[i]);
    }
    buffer_ += "\r\n";
}

void CsvWriter::close() { write_file(path_, buffer_); }

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::string buf = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        char c = buf[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < buf.size() && buf[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < buf.size() && buf[i + 1] == '\n') ++i;
            row.push_back(field);
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
        } else {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fimsar::io
