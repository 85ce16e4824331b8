#pragma once

#include <complex>
#include <filesystem>
#include <vector>

namespace mandel {

/// Inside (iteration cap reached) or escaped at a specific iterate.
struct EscapeResult {
    int iterations = 0;  // meaningful when escaped
    bool inside = true;

    static EscapeResult Inside() { return {0, true}; }
    static EscapeResult Escaped(int k) { return {k, false}; }
    bool operator==(const EscapeResult&) const = default;
};

/// Iterates z <- z^2 + c from z = 0; escaped at the first k with |z| > radius.
EscapeResult escape_time(std::complex<double> c, int max_iter = 500, double radius = 2.0);

struct Bounds {
    double xmin = -2.0, xmax = 0.5, ymin = -1.25, ymax = 1.25;
};

struct RenderGrid {
    int width = 0, height = 0;
    Bounds bounds;
    int max_iter = 500;
    std::vector<EscapeResult> cells;  // row-major, top row first

    const EscapeResult& at(int row, int col) const {
        return cells[static_cast<size_t>(row) * static_cast<size_t>(width) +
                     static_cast<size_t>(col)];
    }
};

/// Escape classification at pixel centers; rows are independent workers.
RenderGrid render(const Bounds& bounds, int width, int height, int max_iter = 500,
                  double radius = 2.0, int threads = 1);

/// Binary PPM (P6): inside black, escaped shaded by iteration count.
void write_ppm(const RenderGrid& grid, const std::filesystem::path& path);

/// Two-column CSV of escape counts (-1 for inside), row-major.
void write_escape_csv(const RenderGrid& grid, const std::filesystem::path& path);

}  // namespace mandel
