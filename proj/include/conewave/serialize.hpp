#pragma once

#include <iosfwd>
#include <string>

#include "conewave/besov.hpp"
#include "conewave/lattice.hpp"
#include "conewave/sampling.hpp"
#include "conewave/spectral.hpp"

namespace conewave {

std::string to_json(const ConeDescriptor& cone);
std::string to_json(const SiegelData& siegel);
std::string to_json(const Grid& grid);
std::string to_json(const LatticeSpec& spec, const LatticeReport* report = nullptr);
std::string to_json(const NormReport& report);

SiegelData siegel_from_json(const std::string& text);
Grid grid_from_json(const std::string& text);

// Binary dump: "CWDUMP1\n", a kind byte, shape header, then row-major complex doubles.
void write_dump(std::ostream& os, const GridFunction& u);
void write_dump(std::ostream& os, const ScalarSymbol& sigma);
GridFunction read_grid_dump(std::istream& is);
ScalarSymbol read_symbol_dump(std::istream& is);

// JSON dump with the same content.
std::string dump_json(const GridFunction& u);
std::string dump_json(const ScalarSymbol& sigma);

}  // namespace conewave
