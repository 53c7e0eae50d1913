#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "vexdelay/solver.hpp"

namespace vexdelay
{

/// Shortest decimal text that reads back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_number(double value);

/// Column names of the trajectory CSV, in order.
inline constexpr std::string_view trajectory_header =
    "t,E,H,I,J,F,L,phi,kinetic,elastic,delay_energy,source_potential,damping_modular,"
    "delay_modular,sup_u";

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// Writes text to path through a temporary sibling and a rename.
void write_file_atomic(const std::string& path, const std::string& text);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace vexdelay
