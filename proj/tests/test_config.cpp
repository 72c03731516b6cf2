#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "slap/config.hpp"
#include "slap/errors.hpp"

using namespace slap;
using doctest::Approx;
using nlohmann::json;

namespace {

const std::string kReference = std::string(SLAP_CONFIG_DIR) + "/rb87_lattice.json";

json reference_doc() { return load_config(kReference).source; }

template <class E>
std::string failing_path(const json& doc) {
    try {
        parse_config(doc);
    } catch (const E& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("reference configuration") {
    const RunConfig cfg = load_config(kReference);
    const DerivedQuantities d = derive(cfg);
    CHECK(d.omega_s0 == Approx(2.0 * std::numbers::pi * 10.8e6).epsilon(0.01));
    CHECK(d.omega_s0 == Approx(oracle::kOmegaS0).epsilon(1e-12));
    CHECK(d.t_delay == Approx(oracle::kDelay).epsilon(1e-12));
    CHECK(d.pulse_area == Approx(19.0).epsilon(1e-12));
    CHECK(d.r == Approx(10.0).epsilon(1e-12));
    CHECK(d.r_prime == Approx(10.0 * std::pow(32.0, 4)).epsilon(1e-12));
    CHECK(d.trap.dx_at == Approx(142e-9).epsilon(2.0 / 142.0));
    CHECK(d.x1 == Approx(532e-9).epsilon(1e-12));
    CHECK(cfg.field.w_s == Approx(32.0 * 795e-9).epsilon(1e-12));
    CHECK(cfg.atom.gamma21 == Approx(0.96 * oracle::kMhz).epsilon(1e-12));
    CHECK(cfg.protocol == Protocol::slap);
    CHECK(cfg.grid.n_points == 201);
    CHECK(cfg.grid.x_min == Approx(-1064e-9).epsilon(1e-12));
    CHECK(cfg.a_const == 20.0);
    CHECK(cfg.digest.size() == 16);

    const json echo = derived_to_json(d);
    CHECK(echo.at("omega_s0_mhz").get<double>() == Approx(10.8).epsilon(0.01));
    CHECK(echo.at("dx_at_nm").get<double>() == Approx(143.28).epsilon(1e-4));
}

TEST_CASE("digest depends on content, not key order") {
    const json a = reference_doc();
    const json b = json::parse(a.dump(4));
    CHECK(config_digest(a) == config_digest(b));
    json c = a;
    c["field"]["r"] = 11;
    CHECK(config_digest(a) != config_digest(c));
}

TEST_CASE("missing keys are reported by full path") {
    json doc = reference_doc();
    doc["field"].erase("sigma_us");
    CHECK(failing_path<ValidationError>(doc) == "field.sigma_us");

    doc = reference_doc();
    doc.erase("lattice");
    CHECK(failing_path<ValidationError>(doc).rfind("lattice", 0) == 0);

    doc = reference_doc();
    doc["field"].erase("delay_factor");
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("SLAP needs a positive delay") {
    json doc = reference_doc();
    doc["field"]["delay_factor"] = 0;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
    doc["protocol"] = "cpt";
    // CPT forces coincident pulses; Omega_S0 T has no meaning so the Stokes
    // amplitude must come from omega_s0_mhz.
    doc["field"].erase("omega_s0_t");
    doc["field"]["omega_s0_mhz"] = 10.8;
    CHECK_NOTHROW(parse_config(doc));
}

TEST_CASE("alternative timing and amplitude keys") {
    json doc = reference_doc();
    doc["field"].erase("delay_factor");
    doc["adiabatic"]["t_delay_us"] = 0.28;
    CHECK(derive(parse_config(doc)).t_delay == Approx(oracle::kDelay).epsilon(1e-12));

    doc = reference_doc();
    doc["field"].erase("delay_factor");
    doc["field"]["t_p_us"] = 0.28;
    CHECK(derive(parse_config(doc)).t_delay == Approx(oracle::kDelay).epsilon(1e-12));

    doc = reference_doc();
    doc["field"]["adiabatic_typo"] = 1;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);

    doc = reference_doc();
    doc["adiabatic"]["t_delay_us"] = 0.28;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);

    doc = reference_doc();
    doc["field"].erase("r");
    doc["field"]["omega_p0_mhz"] = 10.8 * std::sqrt(10.0);
    CHECK(derive(parse_config(doc)).r == Approx(10.0).epsilon(0.01));

    doc = reference_doc();
    doc["field"]["omega_s0_mhz"] = 10.8;
    CHECK_NOTHROW(parse_config(doc));
    doc["field"]["omega_s0_mhz"] = 12.0;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("unit suffixes") {
    json doc = reference_doc();
    doc["field"].erase("sigma_us");
    doc["field"]["sigma"] = 0.2;
    CHECK(failing_path<UnitError>(doc) == "field.sigma");

    doc = reference_doc();
    doc["lattice"].erase("lambda_nm");
    doc["lattice"]["lambda_um"] = 1.064;
    CHECK(failing_path<UnitError>(doc) == "lattice.lambda_um");
}

TEST_CASE("unknown keys and sections") {
    json doc = reference_doc();
    doc["lattice"]["colour"] = "red";
    CHECK(failing_path<ValidationError>(doc) == "lattice.colour");
    doc = reference_doc();
    doc["extras"] = json::object();
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("invalid values") {
    json doc = reference_doc();
    doc["grid"]["n_points"] = 200;
    CHECK(failing_path<ValidationError>(doc) == "grid.n_points");
    doc = reference_doc();
    doc["atom"]["gamma21_mhz"] = -1;
    CHECK(failing_path<ValidationError>(doc) == "atom.gamma21_mhz");
    doc = reference_doc();
    doc["adiabatic"]["a_const"] = 0;
    CHECK(failing_path<ValidationError>(doc) == "adiabatic.a_const");
    doc = reference_doc();
    doc["protocol"] = "stirap";
    CHECK(failing_path<ValidationError>(doc) == "protocol");
    doc = reference_doc();
    doc["field"]["sigma_us"] = "0.2";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_config_text("{ \"atom\": ", "broken.json"), ParseError);
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), ParseError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ParseError);
}
