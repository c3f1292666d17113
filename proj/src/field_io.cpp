#include "ufb/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

namespace ufb {

static_assert(std::endian::native == std::endian::little, "field container assumes a little-endian host");

namespace {

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw InvalidInput("read_field: truncated header");
    return v;
}

}  // namespace

void write_field(std::ostream& os, const SpaceTimeField& u) {
    const Grid& g = u.grid();
    os.write(kFieldMagic, 4);
    put<std::uint32_t>(os, kFieldFormatVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nt));
    put<std::uint32_t>(os, 0);
    put(os, g.a);
    put(os, g.b);
    put(os, g.t0);
    put(os, g.t1);
    const auto v = u.values();
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
}

SpaceTimeField read_field(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kFieldMagic, 4) != 0) throw InvalidInput("read_field: bad magic");
    const auto version = get<std::uint32_t>(is);
    if (version != kFieldFormatVersion)
        throw InvalidInput("read_field: unsupported format version " + std::to_string(version));
    const auto dim = get<std::uint32_t>(is);
    const auto nx = get<std::uint32_t>(is);
    const auto nt = get<std::uint32_t>(is);
    (void)get<std::uint32_t>(is);
    const double a = get<double>(is), b = get<double>(is), t0 = get<double>(is), t1 = get<double>(is);
    const Grid g = Grid::make(static_cast<int>(dim), a, b, static_cast<int>(nx), t0, t1, static_cast<int>(nt));
    std::vector<double> values(g.size());
    is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!is) throw InvalidInput("read_field: truncated value block");
    return SpaceTimeField(g, std::move(values));
}

void write_field(const std::filesystem::path& path, const SpaceTimeField& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_field(os, u);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

SpaceTimeField read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return read_field(is);
}

void write_field_csv(std::ostream& os, const SpaceTimeField& u) {
    const Grid& g = u.grid();
    os << (g.dim == 1 ? "t,x,value\n" : "t,x1,x2,value\n");
    char buf[128];
    double xs[2];
    for (int k = 0; k < g.nt; ++k)
        for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
            g.coords(s, xs);
            if (g.dim == 1)
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.t(k), xs[0], u.at(k, s));
            else
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.t(k), xs[0], xs[1], u.at(k, s));
            os << buf;
        }
}

void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_field_csv(os, u);
}

}  // namespace ufb
