#include "slap/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "slap/errors.hpp"

namespace slap {

namespace {

using nlohmann::json;
using constants::two_pi;

constexpr double kNm = 1e-9;
constexpr double kUs = 1e-6;
constexpr double kMhz = two_pi * 1e6;

// Keys accepted in each section. Dimensional keys end in their unit.
const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> keys{
        {"atom", {"mass_amu", "gamma21_mhz", "gamma23_mhz"}},
        {"lattice", {"lambda_nm", "v0_er", "n_sites"}},
        {"field",
         {"lambda_l_nm", "w_p_nm", "w_p_lambda_l", "w_s_nm", "w_s_lambda_l", "sigma_us", "t_s_us",
          "t_p_us", "delay_factor", "omega_s0_t", "omega_s0_mhz", "r", "omega_p0_mhz", "delta_p_mhz",
          "delta_s_mhz"}},
        {"adiabatic", {"a_const", "t_delay_us"}},
        {"integrator", {"rel_tol", "abs_tol", "max_step_us", "max_steps"}},
        {"grid", {"x_min_nm", "x_max_nm", "n_points"}},
    };
    return keys;
}

const std::vector<std::string> kUnitSuffixes{"_nm", "_us", "_mhz", "_amu", "_er", "_lambda_l"};

std::string strip_unit(const std::string& key) {
    for (const auto& suffix : kUnitSuffixes) {
        if (key.size() > suffix.size() && key.ends_with(suffix)) {
            return key.substr(0, key.size() - suffix.size());
        }
    }
    return key;
}

std::string strip_last_token(const std::string& key) {
    const auto pos = key.rfind('_');
    return pos == std::string::npos ? key : key.substr(0, pos);
}

// Explains an unrecognised key: a known quantity with a missing or foreign
// unit is a UnitError, anything else a ValidationError.
[[noreturn]] void reject_key(const std::string& section, const std::string& key) {
    const std::string path = section + "." + key;
    std::vector<std::string> expected;
    for (const auto& known : schema().at(section)) {
        const std::string base = strip_unit(known);
        if (base == known) continue;  // dimensionless
        if (key == base || strip_last_token(key) == base) expected.push_back(known);
    }
    if (!expected.empty()) {
        std::string list;
        for (const auto& e : expected) list += (list.empty() ? "" : " or ") + e;
        throw UnitError(path, fmt::format("missing or unsupported unit suffix (expected {})", list));
    }
    throw ValidationError(path, "unknown key");
}

class Section {
public:
    Section(const json& doc, std::string name, bool required)
        : name_(std::move(name)) {
        if (!doc.contains(name_)) {
            if (required) throw ValidationError(name_, "missing required section");
            return;
        }
        const json& node = doc.at(name_);
        if (!node.is_object()) throw ValidationError(name_, "must be an object");
        node_ = &node;
        const auto& allowed = schema().at(name_);
        for (const auto& [key, value] : node.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) reject_key(name_, key);
        }
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }

    bool has(const std::string& key) const { return node_ != nullptr && node_->contains(key); }

    std::optional<double> number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const json& v = node_->at(key);
        if (!v.is_number()) throw ValidationError(path(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ValidationError(path(key), "must be finite");
        return d;
    }

    double required(const std::string& key) const {
        auto v = number(key);
        if (!v) throw ValidationError(path(key), "missing required key");
        return *v;
    }

    double positive(const std::string& key) const {
        const double v = required(key);
        if (!(v > 0.0)) throw ValidationError(path(key), "must be > 0");
        return v;
    }

    std::optional<double> positive_opt(const std::string& key) const {
        auto v = number(key);
        if (v && !(*v > 0.0)) throw ValidationError(path(key), "must be > 0");
        return v;
    }

    std::optional<long> integer(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const json& v = node_->at(key);
        if (!v.is_number_integer()) throw ValidationError(path(key), "expected an integer");
        return v.get<long>();
    }

    /// Value of exactly one of the given keys, or ValidationError.
    std::pair<std::string, double> one_of(std::initializer_list<std::string> keys, bool allow_none = false) const {
        std::optional<std::pair<std::string, double>> found;
        std::string names;
        for (const auto& k : keys) {
            names += (names.empty() ? "" : ", ") + k;
            if (auto v = number(k)) {
                if (found) {
                    throw ValidationError(path(k), fmt::format("conflicts with {}", path(found->first)));
                }
                found = std::pair{k, *v};
            }
        }
        if (!found) {
            if (allow_none) return {"", 0.0};
            throw ValidationError(path(*keys.begin()), fmt::format("missing required key (one of {})", names));
        }
        return *found;
    }

private:
    std::string name_;
    const json* node_ = nullptr;
};

}  // namespace

std::string config_digest(const json& doc) {
    const std::string text = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ParseError("<root>", "configuration must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "protocol" && !schema().contains(key)) throw ValidationError(key, "unknown section");
    }

    RunConfig cfg;
    cfg.source = doc;
    cfg.digest = config_digest(doc);

    if (doc.contains("protocol")) {
        const json& p = doc.at("protocol");
        if (!p.is_string()) throw ValidationError("protocol", "expected \"slap\" or \"cpt\"");
        const auto name = p.get<std::string>();
        if (name == "slap") {
            cfg.protocol = Protocol::slap;
        } else if (name == "cpt") {
            cfg.protocol = Protocol::cpt;
        } else {
            throw ValidationError("protocol", fmt::format("unknown protocol \"{}\"", name));
        }
    }

    const Section atom(doc, "atom", true);
    cfg.atom.mass = atom.positive("mass_amu") * constants::atomic_mass_unit;
    cfg.atom.gamma21 = atom.required("gamma21_mhz") * kMhz;
    cfg.atom.gamma23 = atom.required("gamma23_mhz") * kMhz;
    if (cfg.atom.gamma21 < 0.0) throw ValidationError(atom.path("gamma21_mhz"), "must be >= 0");
    if (cfg.atom.gamma23 < 0.0) throw ValidationError(atom.path("gamma23_mhz"), "must be >= 0");

    const Section lattice(doc, "lattice", true);
    cfg.lattice.lambda = lattice.positive("lambda_nm") * kNm;
    cfg.lattice.v0_over_er = lattice.positive("v0_er");
    if (auto n = lattice.integer("n_sites")) {
        if (*n < 1 || *n % 2 == 0) throw ValidationError(lattice.path("n_sites"), "must be a positive odd count");
        cfg.lattice.n_sites = static_cast<int>(*n);
    }

    const Section field(doc, "field", true);
    const Section adiabatic(doc, "adiabatic", true);
    FieldSpec& f = cfg.field;
    f.lambda_l = field.positive("lambda_l_nm") * kNm;
    auto width = [&](const std::string& base) {
        const auto [key, v] = field.one_of({base + "_nm", base + "_lambda_l"});
        if (!(v > 0.0)) throw ValidationError(field.path(key), "must be > 0");
        return key.ends_with("_nm") ? v * kNm : v * f.lambda_l;
    };
    f.w_p = width("w_p");
    f.w_s = width("w_s");
    f.sigma = field.positive("sigma_us") * kUs;
    f.t_s = field.number("t_s_us").value_or(0.0) * kUs;

    // Pulse delay: a multiple of sigma, an explicit T, or an explicit pump centre.
    const auto delay_factor = field.number("delay_factor");
    const auto t_delay = adiabatic.number("t_delay_us");
    const auto t_p = field.number("t_p_us");
    const int timing_keys = int(delay_factor.has_value()) + int(t_delay.has_value()) + int(t_p.has_value());
    if (timing_keys == 0) {
        throw ValidationError(field.path("delay_factor"),
                              "missing required key (one of field.delay_factor, adiabatic.t_delay_us, field.t_p_us)");
    }
    if (timing_keys > 1) {
        throw ValidationError(field.path("delay_factor"),
                              "give only one of field.delay_factor, adiabatic.t_delay_us, field.t_p_us");
    }
    std::string timing_path;
    double T = 0.0;
    if (delay_factor) {
        T = *delay_factor * f.sigma;
        timing_path = field.path("delay_factor");
    } else if (t_delay) {
        T = *t_delay * kUs;
        timing_path = adiabatic.path("t_delay_us");
    } else {
        T = *t_p * kUs - f.t_s;
        timing_path = field.path("t_p_us");
    }
    f.t_p = f.t_s + T;
    if (cfg.protocol == Protocol::slap && !(T > 0.0)) {
        throw ValidationError(timing_path, "SLAP needs the Stokes pulse first: pulse delay T must be > 0");
    }
    if (cfg.protocol == Protocol::cpt && T < 0.0) {
        throw ValidationError(timing_path, "pulse delay must not be negative");
    }

    const auto area = field.positive_opt("omega_s0_t");
    const auto os0_mhz = field.positive_opt("omega_s0_mhz");
    if (!area && !os0_mhz) {
        throw ValidationError(field.path("omega_s0_t"), "missing required key (one of omega_s0_t, omega_s0_mhz)");
    }
    if (area && !(T > 0.0)) {
        throw ValidationError(field.path("omega_s0_t"), "needs a positive pulse delay; give omega_s0_mhz instead");
    }
    if (os0_mhz) {
        f.omega_s0 = *os0_mhz * kMhz;
        if (area && std::abs(f.omega_s0 * T / *area - 1.0) > 0.01) {
            throw ValidationError(field.path("omega_s0_mhz"),
                                  fmt::format("inconsistent with omega_s0_t = {} (gives {:.6g})", *area, f.omega_s0 * T));
        }
    } else {
        f.omega_s0 = *area / T;
    }

    const auto [pump_key, pump] = field.one_of({"r", "omega_p0_mhz"});
    if (pump < 0.0) throw ValidationError(field.path(pump_key), "must be >= 0");
    f.omega_p0 = pump_key == "r" ? f.omega_s0 * std::sqrt(pump) : pump * kMhz;

    f.delta_p = field.number("delta_p_mhz").value_or(0.0) * kMhz;
    f.delta_s = field.number("delta_s_mhz").value_or(0.0) * kMhz;

    cfg.a_const = adiabatic.positive("a_const");

    const Section integrator(doc, "integrator", false);
    if (auto v = integrator.positive_opt("rel_tol")) cfg.integrator.rel_tol = *v;
    if (auto v = integrator.positive_opt("abs_tol")) cfg.integrator.abs_tol = *v;
    if (auto v = integrator.positive_opt("max_step_us")) cfg.integrator.max_step = *v * kUs;
    if (auto v = integrator.integer("max_steps")) {
        if (*v <= 0) throw ValidationError(integrator.path("max_steps"), "must be > 0");
        cfg.integrator.max_steps = *v;
    }

    const Section grid(doc, "grid", false);
    cfg.grid = SpatialGrid::symmetric(cfg.lattice.lambda, 201);
    if (auto v = grid.number("x_min_nm")) cfg.grid.x_min = *v * kNm;
    if (auto v = grid.number("x_max_nm")) cfg.grid.x_max = *v * kNm;
    if (auto v = grid.integer("n_points")) cfg.grid.n_points = static_cast<int>(*v);
    cfg.grid.validate();

    cfg.atom.validate();
    cfg.lattice.validate();
    cfg.field.validate();
    cfg.integrator.validate();
    return cfg;
}

RunConfig parse_config_text(std::string_view text, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source_name, e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

DerivedQuantities derive(const RunConfig& cfg) {
    DerivedQuantities d;
    d.t_delay = cfg.field.delay();
    d.omega_s0 = cfg.field.omega_s0;
    d.omega_p0 = cfg.field.omega_p0;
    d.pulse_area = d.omega_s0 * d.t_delay;
    d.r = cfg.field.ratio();
    d.r_prime = cfg.field.ratio_prime();
    d.trap = derive_trap(cfg.lattice, cfg.atom);
    d.x1 = cfg.lattice.spacing();
    return d;
}

json derived_to_json(const DerivedQuantities& d) {
    return json{
        {"t_delay_us", d.t_delay / kUs},
        {"omega_s0_mhz", d.omega_s0 / kMhz},
        {"omega_p0_mhz", d.omega_p0 / kMhz},
        {"omega_s0_t", d.pulse_area},
        {"r", d.r},
        {"r_prime", d.r_prime},
        {"omega_trap_khz", d.trap.omega_trap / (two_pi * 1e3)},
        {"w_at_nm", d.trap.w_at / kNm},
        {"dx_at_nm", d.trap.dx_at / kNm},
        {"x1_nm", d.x1 / kNm},
    };
}

}  // namespace slap
