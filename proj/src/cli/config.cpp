#include "ertrans/cli/config.hpp"

#include "ertrans/csv.hpp"
#include "ertrans/error.hpp"
#include "ertrans/keyvalue.hpp"

#include <functional>
#include <numbers>
#include <sstream>

#ifndef ERTRANS_DATA_DIR
#define ERTRANS_DATA_DIR "data"
#endif

namespace ertrans::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Setter = std::function<void(RunConfig&, const kv::Document&, const kv::Entry&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
    const char* section;
    const char* key;
    Setter set;
    Getter get;
};

std::string fmt(double v) { return csv::format(v); }

std::string fmt3(const Eigen::Vector3d& v) { return fmt(v(0)) + ", " + fmt(v(1)) + ", " + fmt(v(2)); }

Eigen::Vector3d vec3(const kv::Document& d, const kv::Entry& e) {
    const auto v = kv::to_doubles(d, e, 3);
    return {v[0], v[1], v[2]};
}

bool to_bool(const kv::Document& d, const kv::Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw Error(ErrorKind::Config, d.where(e) + ": key '" + e.key + "' expects true or false");
}

template <class F>
auto wrap_enum(const kv::Document& d, const kv::Entry& e, F parse) {
    try {
        return parse(e.value);
    } catch (const Error& err) {
        throw Error(ErrorKind::Config, d.where(e) + ": key '" + e.key + "': " + err.what());
    }
}

#define NUM(sec, name, expr_get, assign)                                                         \
    Field {                                                                                      \
        sec, name,                                                                               \
            [](RunConfig& c, const kv::Document& d, const kv::Entry& e) {                        \
                const double v = kv::to_double(d, e);                                            \
                assign;                                                                          \
            },                                                                                   \
            [](const RunConfig& c) { return fmt(expr_get); }                                     \
    }

#define INT(sec, name, member)                                                                    \
    Field {                                                                                       \
        sec, name, [](RunConfig& c, const kv::Document& d, const kv::Entry& e) { member = kv::to_int(d, e); }, \
            [](const RunConfig& c) { return std::to_string(member); }                             \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table{
        NUM("protocol", "G_over_2pi_MHz", c.G_over_2pi_MHz, (c.G_over_2pi_MHz = v, c.sync_units())),
        NUM("protocol", "alpha_over_G", c.protocol.alpha, c.protocol.alpha = v),
        NUM("protocol", "kappa1_over_G", c.protocol.kappa1, c.protocol.kappa1 = v),
        NUM("protocol", "kappa2_over_G", c.protocol.kappa2, c.protocol.kappa2 = v),
        NUM("protocol", "gamma_s_over_G", c.protocol.gamma_s, c.protocol.gamma_s = v),
        NUM("protocol", "gamma_star_over_G", c.protocol.gamma_star, c.protocol.gamma_star = v),
        NUM("protocol", "omega_over_2pi_GHz", c.omega_over_2pi_GHz, (c.omega_over_2pi_GHz = v, c.sync_units())),
        NUM("protocol", "temperature_mK", c.temperature_mK, (c.temperature_mK = v, c.sync_units())),
        NUM("protocol", "time_ratio", c.protocol.time_ratio, c.protocol.time_ratio = v),
        Field{"protocol", "direction",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) {
                  c.protocol.direction = wrap_enum(d, e, protocol::parse_direction);
              },
              [](const RunConfig& c) { return protocol::to_string(c.protocol.direction); }},
        Field{"protocol", "orientation",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) {
                  if (e.value == "auto") {
                      c.auto_orientation = true;
                      return;
                  }
                  c.auto_orientation = false;
                  c.protocol.orientation = wrap_enum(d, e, protocol::parse_orientation);
              },
              [](const RunConfig& c) {
                  return c.auto_orientation ? std::string("auto") : protocol::to_string(c.protocol.orientation);
              }},
        Field{"protocol", "signal_input",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) {
                  c.protocol.signal_input = wrap_enum(d, e, protocol::parse_signal_input);
              },
              [](const RunConfig& c) { return protocol::to_string(c.protocol.signal_input); }},

        NUM("numerics", "steps_per_unit", c.protocol.steps_per_unit, c.protocol.steps_per_unit = v),
        Field{"numerics", "step_over_invG",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) {
                  if (e.value == "auto") c.protocol.step_override.reset();
                  else c.protocol.step_override = kv::to_double(d, e);
              },
              [](const RunConfig& c) {
                  return c.protocol.step_override ? fmt(*c.protocol.step_override) : std::string("auto");
              }},
        INT("numerics", "dim_optical", c.protocol.dims.optical),
        INT("numerics", "dim_microwave", c.protocol.dims.microwave),
        INT("numerics", "dim_spin", c.protocol.dims.spin),
        INT("numerics", "capture_stride", c.capture_stride),
        INT("numerics", "workers", c.workers),

        Field{"sweep", "parameter",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) {
                  c.sweep.parameter = wrap_enum(d, e, experiments::parse_swept_parameter);
              },
              [](const RunConfig& c) { return experiments::to_string(c.sweep.parameter); }},
        NUM("sweep", "lo", c.sweep.lo, c.sweep.lo = v),
        NUM("sweep", "hi", c.sweep.hi, c.sweep.hi = v),
        NUM("sweep", "step", c.sweep.step, c.sweep.step = v),
        Field{"sweep", "with_noise",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) { c.sweep.with_noise = to_bool(d, e); },
              [](const RunConfig& c) { return std::string(c.sweep.with_noise ? "true" : "false"); }},

        Field{"spin", "params_file",
              [](RunConfig& c, const kv::Document&, const kv::Entry& e) { c.spin.params_file = e.value; },
              [](const RunConfig& c) { return c.spin.params_file.string(); }},
        Field{"spin", "B_T", [](RunConfig& c, const kv::Document& d, const kv::Entry& e) { c.spin.B_T = vec3(d, e); },
              [](const RunConfig& c) { return fmt3(c.spin.B_T); }},
        NUM("spin", "window_lo_GHz", c.spin.window_lo_GHz, c.spin.window_lo_GHz = v),
        NUM("spin", "window_hi_GHz", c.spin.window_hi_GHz, c.spin.window_hi_GHz = v),
        NUM("spin", "delta_B_uT", c.spin.delta_B_uT, c.spin.delta_B_uT = v),
        NUM("spin", "degeneracy_tol_MHz", c.spin.degeneracy_tol_MHz, c.spin.degeneracy_tol_MHz = v),
        Field{"spin", "probe_axis",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) { c.spin.probe_axis = vec3(d, e); },
              [](const RunConfig& c) { return fmt3(c.spin.probe_axis); }},
        NUM("spin", "zefoz_tol_Hz_per_T", c.spin.zefoz_tol_Hz_per_T, c.spin.zefoz_tol_Hz_per_T = v),
        Field{"spin", "sweep_axis",
              [](RunConfig& c, const kv::Document& d, const kv::Entry& e) {
                  wrap_enum(d, e, spin::axis_from_name);
                  c.spin.sweep_axis = e.value;
              },
              [](const RunConfig& c) { return c.spin.sweep_axis; }},
        NUM("spin", "sweep_Bmax_T", c.spin.sweep_Bmax_T, c.spin.sweep_Bmax_T = v),
        INT("spin", "sweep_steps", c.spin.sweep_steps),
        INT("spin", "table_rows", c.spin.table_rows),

        Field{"output", "dir", [](RunConfig& c, const kv::Document&, const kv::Entry& e) { c.out_dir = e.value; },
              [](const RunConfig& c) { return c.out_dir.string(); }},
    };
    return table;
}

#undef NUM
#undef INT

void apply_document(RunConfig& cfg, const kv::Document& doc) {
    for (const auto& e : doc.entries()) {
        const Field* match = nullptr;
        for (const auto& f : fields()) {
            if (e.section == f.section && e.key == f.key) {
                match = &f;
                break;
            }
        }
        if (match == nullptr) {
            const std::string id = e.section.empty() ? e.key : e.section + "." + e.key;
            throw Error(ErrorKind::Config, doc.where(e) + ": unknown key '" + id + "'");
        }
        match->set(cfg, doc, e);
    }
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.protocol = protocol::reference_params();
    c.sync_units();
    c.spin.params_file = std::filesystem::path(ERTRANS_DATA_DIR) / "er167_yso_site1.params";
    return c;
}

void RunConfig::sync_units() {
    protocol.G_rad_per_s = G_over_2pi_MHz * kTwoPi * 1e6;
    protocol.omega_mw_rad_per_s = omega_over_2pi_GHz * kTwoPi * 1e9;
    protocol.temperature_K = temperature_mK * 1e-3;
}

void RunConfig::validate() const {
    try {
        protocol.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("invalid [protocol]/[numerics] value: ") + e.what());
    }
    const auto bad = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
    if (capture_stride < 0) bad("numerics.capture_stride must be >= 0");
    if (workers < 1) bad("numerics.workers must be >= 1");
    if (!(sweep.step > 0.0) || !(sweep.hi >= sweep.lo)) bad("sweep needs lo <= hi and step > 0");
    if (!(spin.window_hi_GHz >= spin.window_lo_GHz)) bad("spin window is inverted");
    if (!(spin.delta_B_uT > 0.0)) bad("spin.delta_B_uT must be > 0");
    if (!(spin.degeneracy_tol_MHz >= 0.0)) bad("spin.degeneracy_tol_MHz must be >= 0");
    if (!(spin.probe_axis.norm() > 0.0)) bad("spin.probe_axis must be nonzero");
    if (!(spin.zefoz_tol_Hz_per_T > 0.0)) bad("spin.zefoz_tol_Hz_per_T must be > 0");
    if (spin.sweep_steps < 2) bad("spin.sweep_steps must be >= 2");
    if (spin.table_rows < 1) bad("spin.table_rows must be >= 1");
}

RunConfig parse_config(std::string_view text, const std::string& origin, RunConfig base) {
    apply_document(base, kv::Document::parse(text, origin));
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    apply_document(base, kv::Document::load(path));
    return base;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto dot = assignment.find('.');
    const auto eq = assignment.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
        throw Error(ErrorKind::Config, "override '" + assignment + "' is not of the form section.key=value");
    }
    const std::string text =
        "[" + assignment.substr(0, dot) + "]\n" + assignment.substr(dot + 1, eq - dot - 1) + " = " + assignment.substr(eq + 1);
    apply_document(cfg, kv::Document::parse(text, "--set " + assignment));
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : fields()) out.emplace_back(std::string(f.section) + "." + f.key, f.get(cfg));
    return out;
}

std::string print_config(const RunConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) os << "\n";
            section = f.section;
            os << "[" << section << "]\n";
        }
        os << f.key << " = " << f.get(cfg) << "\n";
    }
    return os.str();
}

}  // namespace ertrans::cli
