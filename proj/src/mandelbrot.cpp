#include "mandel/mandelbrot.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mandel/parallel.hpp"

namespace mandel {

EscapeResult escape_time(std::complex<double> c, int max_iter, double radius) {
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (radius < 2.0) throw std::invalid_argument("escape radius must be >= 2");
    const double r2 = radius * radius;
    double zx = 0.0, zy = 0.0;
    for (int k = 1; k <= max_iter; ++k) {
        const double nx = zx * zx - zy * zy + c.real();
        const double ny = 2.0 * zx * zy + c.imag();
        zx = nx;
        zy = ny;
        if (zx * zx + zy * zy > r2) return EscapeResult::Escaped(k);
    }
    return EscapeResult::Inside();
}

RenderGrid render(const Bounds& bounds, int width, int height, int max_iter, double radius,
                  int threads) {
    if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be positive");
    if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin))
        throw std::invalid_argument("degenerate bounds");
    RenderGrid grid;
    grid.width = width;
    grid.height = height;
    grid.bounds = bounds;
    grid.max_iter = max_iter;
    grid.cells.resize(static_cast<size_t>(width) * static_cast<size_t>(height));

    const double dx = (bounds.xmax - bounds.xmin) / width;
    const double dy = (bounds.ymax - bounds.ymin) / height;
    parallel_chunks(0, height, threads, [&](long lo, long hi) {
        for (long row = lo; row < hi; ++row) {
            const double y = bounds.ymax - (static_cast<double>(row) + 0.5) * dy;
            for (int col = 0; col < width; ++col) {
                const double x = bounds.xmin + (static_cast<double>(col) + 0.5) * dx;
                grid.cells[static_cast<size_t>(row) * static_cast<size_t>(width) +
                           static_cast<size_t>(col)] = escape_time({x, y}, max_iter, radius);
            }
        }
    });
    return grid;
}

void write_ppm(const RenderGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "P6\n" << grid.width << " " << grid.height << "\n255\n";
    const double denom = std::log1p(static_cast<double>(grid.max_iter));
    for (const auto& cell : grid.cells) {
        unsigned char rgb[3] = {0, 0, 0};
        if (!cell.inside) {
            // log shading keeps low iteration counts distinguishable
            const double s = std::log1p(static_cast<double>(cell.iterations)) / denom;
            const unsigned char v = static_cast<unsigned char>(255.0 * (1.0 - 0.85 * s));
            rgb[0] = v;
            rgb[1] = v;
            rgb[2] = static_cast<unsigned char>(std::min(255.0, v * 1.1 + 16.0));
        }
        out.write(reinterpret_cast<const char*>(rgb), 3);
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_escape_csv(const RenderGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "row,col,escape_iterations\n";
    for (int row = 0; row < grid.height; ++row)
        for (int col = 0; col < grid.width; ++col) {
            const auto& cell = grid.at(row, col);
            out << row << ',' << col << ',' << (cell.inside ? -1 : cell.iterations) << '\n';
        }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace mandel
