#pragma once

#include <iosfwd>
#include <string>

#include "rage/circuits.hpp"
#include "rage/mps.hpp"
#include "rage/peps.hpp"
#include "rage/rage_state.hpp"
#include "rage/tts.hpp"
#include "rage/wgs.hpp"

namespace rage {

// Line-oriented structured-text format, decimal with 17 significant digits.
// Every object starts with "%RAGE-TNS 1" / "object <kind>" and closes with
// "end"; tensor entries are one "re im" pair per line in row-major order.

void write_mps(std::ostream& os, const MpsState& m);
MpsState read_mps(std::istream& is);

void write_tts(std::ostream& os, const TtsState& t);
TtsState read_tts(std::istream& is);

void write_phases(std::ostream& os, const AdjacencyPhases& p);
AdjacencyPhases read_phases(std::istream& is);

void write_rotations(std::ostream& os, const LocalRotations& r);
LocalRotations read_rotations(std::istream& is);

void write_rage(std::ostream& os, const RageState& r);
RageState read_rage(std::istream& is);

void write_circuit(std::ostream& os, const Circuit& c);
Circuit read_circuit(std::istream& is);

void write_hamiltonian(std::ostream& os, const HamiltonianSum& h);
HamiltonianSum read_hamiltonian(std::istream& is);

void write_peps(std::ostream& os, const PepsState& p);
PepsState read_peps(std::istream& is);

std::string format_double(double v);  // 17 significant digits

}  // namespace rage
