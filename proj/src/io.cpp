#include "rggfpp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "rggfpp/errors.hpp"

namespace rggfpp {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

void put_field(std::ostream& out, std::string_view f) {
    if (f.find_first_of(",\"\n\r") == std::string_view::npos) {
        out << f;
        return;
    }
    out << '"';
    for (char c : f) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

void write_csv_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
    bool first = true;
    for (auto f : fields) {
        if (!first) out << ',';
        put_field(out, f);
        first = false;
    }
    out << '\n';
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        put_field(out, fields[i]);
    }
    out << '\n';
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw IntegrityError("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

SvgCanvas::SvgCanvas(double x_min, double y_min, double x_max, double y_max, double pixels)
    : x_min_(x_min), y_min_(y_min) {
    const double span = std::max(x_max - x_min, y_max - y_min);
    scale_ = span > 0 ? pixels / span : 1.0;
    width_ = (x_max - x_min) * scale_;
    height_ = (y_max - y_min) * scale_;
}

double SvgCanvas::px(double x) const { return (x - x_min_) * scale_; }
double SvgCanvas::py(double y) const { return height_ - (y - y_min_) * scale_; }

namespace {
// Fixed 2-decimal pixel coordinates keep files small and stable.
std::string pix(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, std::round(v * 100.0) / 100.0);
    return std::string(buf, res.ptr);
}
}  // namespace

void SvgCanvas::circle(double x, double y, double radius_px, std::string_view fill) {
    body_ += "<circle cx=\"" + pix(px(x)) + "\" cy=\"" + pix(py(y)) + "\" r=\"" + pix(radius_px) +
             "\" fill=\"" + std::string(fill) + "\"/>\n";
}

void SvgCanvas::ring(double x, double y, double radius, std::string_view stroke, double width_px,
                     std::string_view dash) {
    body_ += "<circle cx=\"" + pix(px(x)) + "\" cy=\"" + pix(py(y)) + "\" r=\"" + pix(radius * scale_) +
             "\" fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + pix(width_px) + "\"";
    if (!dash.empty()) body_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
    body_ += "/>\n";
}

void SvgCanvas::line(double x0, double y0, double x1, double y1, std::string_view stroke, double width_px) {
    body_ += "<line x1=\"" + pix(px(x0)) + "\" y1=\"" + pix(py(y0)) + "\" x2=\"" + pix(px(x1)) + "\" y2=\"" +
             pix(py(y1)) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + pix(width_px) + "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double side, std::string_view fill, double opacity) {
    body_ += "<rect x=\"" + pix(px(x)) + "\" y=\"" + pix(py(y + side)) + "\" width=\"" + pix(side * scale_) +
             "\" height=\"" + pix(side * scale_) + "\" fill=\"" + std::string(fill) + "\" fill-opacity=\"" +
             pix(opacity) + "\"/>\n";
}

void SvgCanvas::text(double x, double y, std::string_view content) {
    body_ += "<text x=\"" + pix(px(x)) + "\" y=\"" + pix(py(y)) + "\" font-size=\"12\">" + std::string(content) +
             "</text>\n";
}

std::string SvgCanvas::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + pix(width_) + "\" height=\"" +
                      pix(height_) + "\" viewBox=\"0 0 " + pix(width_) + " " + pix(height_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + pix(width_) + "\" height=\"" + pix(height_) +
           "\" fill=\"white\" stroke=\"black\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

}  // namespace rggfpp
