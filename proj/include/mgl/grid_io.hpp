#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mgl/errors.hpp"
#include "mgl/grid.hpp"

namespace mgl {

/// "mgl-grid v1" text format:
///   # mgl-grid v1
///   nx ny ncomp
///   x0 y0 hx hy
///   then nx*ny lines of ncomp space-separated decimals, row-major
///   (y outer, x inner). Values are written with 17 significant digits so
///   a round trip is bit-exact.
inline void write_grid(const GridField& g, std::ostream& os) {
    os << "# mgl-grid v1\n";
    os << g.nx() << ' ' << g.ny() << ' ' << g.ncomp() << '\n';
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", g.x0(), g.y0(), g.hx(), g.hy());
    os << buf;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            for (int c = 0; c < g.ncomp(); ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g", g.at(i, j, c));
                os << (c ? " " : "") << buf;
            }
            os << '\n';
        }
}

inline void write_grid_file(const GridField& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_grid(g, os);
    if (!os) throw IoError("write failed for '" + path + "'");
}

inline GridField read_grid(std::istream& is) {
    std::string line;
    int lineno = 0;

    auto next_line = [&]() -> std::string& {
        if (!std::getline(is, line)) throw ParseError("unexpected end of file", lineno + 1);
        ++lineno;
        return line;
    };

    next_line();
    if (line != "# mgl-grid v1")
        throw ParseError("bad header, expected '# mgl-grid v1'", lineno);

    int nx = 0, ny = 0, ncomp = 0;
    {
        std::istringstream ss(next_line());
        if (!(ss >> nx >> ny >> ncomp))
            throw ParseError("expected 'nx ny ncomp'", lineno);
    }
    double x0 = 0, y0 = 0, hx = 0, hy = 0;
    {
        std::istringstream ss(next_line());
        if (!(ss >> x0 >> y0 >> hx >> hy))
            throw ParseError("expected 'x0 y0 hx hy'", lineno);
    }
    if (nx < 5 || ny < 5 || ncomp < 1 || !(hx > 0) || !(hy > 0))
        throw ParseError("invalid grid dimensions or spacings", lineno);

    GridField g(nx, ny, ncomp, x0, y0, hx, hy);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            std::istringstream ss(next_line());
            for (int c = 0; c < ncomp; ++c) {
                double v;
                if (!(ss >> v)) throw ParseError("expected " + std::to_string(ncomp) +
                                                 " values on sample line", lineno);
                g.at(i, j, c) = v;
            }
        }
    return g;
}

inline GridField read_grid_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    return read_grid(is);
}

}  // namespace mgl
