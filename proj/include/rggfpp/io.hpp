#pragma once

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rggfpp/geometry.hpp"

namespace rggfpp {

/// Shortest round-trip decimal form, locale independent ("nan"/"inf" for
/// non-finite values).
std::string format_double(double x);

/// Comma-separated row; fields are written verbatim.
void write_csv_row(std::ostream& out, std::initializer_list<std::string_view> fields);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Writes `content` to `path`, creating parent directories. IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(std::string_view bytes);

/// Minimal deterministic SVG builder in world coordinates. The y axis is
/// flipped so that +y points up.
class SvgCanvas {
public:
    SvgCanvas(double x_min, double y_min, double x_max, double y_max, double pixels = 800.0);

    void circle(double x, double y, double radius_px, std::string_view fill);
    /// Circle with a radius in world units, stroked only.
    void ring(double x, double y, double radius, std::string_view stroke, double width_px = 1.5,
              std::string_view dash = {});
    void line(double x0, double y0, double x1, double y1, std::string_view stroke, double width_px);
    void rect(double x, double y, double side, std::string_view fill, double opacity);
    void text(double x, double y, std::string_view content);

    std::string str() const;

private:
    double px(double x) const;
    double py(double y) const;

    double x_min_, y_min_, scale_, width_, height_;
    std::string body_;
};

}  // namespace rggfpp
