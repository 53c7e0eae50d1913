#include "vexdelay/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace vexdelay
{

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (value == 0)
        return "0";
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
    out << trajectory_header << '\n';
    for (const Sample& s : trajectory.samples) {
        const EnergyReport& r = s.report;
        const double row[] = {r.t,       r.E,       r.H,
                              r.I,       r.J,       r.F,
                              r.L,       r.phi,     r.kinetic,
                              r.elastic, r.delay_energy, r.source_potential,
                              r.damping_modular, r.delay_modular, s.sup_u};
        bool first = true;
        for (double value : row) {
            if (!first)
                out << ',';
            out << format_number(value);
            first = false;
        }
        out << '\n';
    }
}

void write_file_atomic(const std::string& path, const std::string& text)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp + " for writing");
        out << text;
        if (!out.flush())
            throw std::runtime_error("write to " + tmp + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string fnv1a_hex(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
    return buffer;
}

}  // namespace vexdelay
