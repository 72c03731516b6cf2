#pragma once

// Run configuration: a JSON document with sections atom, lattice, field,
// adiabatic, integrator, grid and a protocol selector. Every dimensional key
// carries its unit as a suffix (_nm, _us, _mhz, _amu, _er, _lambda_l);
// frequencies are ordinary frequencies in MHz and are multiplied by 2 pi on
// load. See README.md for the full schema.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "slap/dynamics.hpp"
#include "slap/model.hpp"
#include "slap/scan.hpp"

namespace slap {

struct RunConfig {
    AtomSpec atom;
    LatticeSpec lattice;
    FieldSpec field;
    double a_const = 20.0;
    IntegratorConfig integrator;
    SpatialGrid grid;
    Protocol protocol = Protocol::slap;

    nlohmann::json source;  ///< the document as written, before unit conversion
    std::string digest;     ///< FNV-1a 64 of the canonical source, hex
};

struct DerivedQuantities {
    double t_delay = 0.0;   ///< s
    double omega_s0 = 0.0;  ///< rad/s
    double omega_p0 = 0.0;  ///< rad/s
    double pulse_area = 0.0;  ///< Omega_S0 T
    double r = 0.0;
    double r_prime = 0.0;
    TrapDerived trap;
    double x1 = 0.0;  ///< nearest-neighbour distance, m
};

/// Throws ParseError, UnitError or ValidationError, each naming the field path.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, const std::string& source_name = "<config>");
RunConfig parse_config(const nlohmann::json& doc);

DerivedQuantities derive(const RunConfig& cfg);

/// Derived quantities in the configuration's conventional units.
nlohmann::json derived_to_json(const DerivedQuantities& d);

/// 64-bit FNV-1a of the compact dump of doc (keys sorted), as 16 hex digits.
std::string config_digest(const nlohmann::json& doc);

}  // namespace slap
