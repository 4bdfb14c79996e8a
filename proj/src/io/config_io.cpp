#include "eaclutch/io/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <set>

#include "eaclutch/errors.hpp"
#include "eaclutch/io/csv.hpp"

namespace eaclutch::io {

using nlohmann::json;

namespace {

const char* waveform_name(Waveform w) { return w == Waveform::dc ? "dc" : "bipolar_square"; }

const char* law_name(LambdaLaw l) {
    switch (l) {
        case LambdaLaw::unity: return "unity";
        case LambdaLaw::fixed: return "fixed";
        case LambdaLaw::linear: return "linear";
    }
    return "linear";
}

// Walks one object, remembering which keys were consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& get(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) throw ConfigError(at(key), "missing required field");
        used_.insert(key);
        return *it;
    }

    double num(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        return v.get<double>();
    }

    int integer(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key) {
        const json& v = get(key);
        if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string str(const std::string& key) {
        const json& v = get(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    Section sub(const std::string& key) { return Section(get(key), at(key)); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

}  // namespace

json to_json(const RunConfig& rc) {
    const ClutchConfig& c = rc.clutch;
    json j;
    j["geometry"] = {
        {"n_electrodes", c.geometry.n_electrodes},
        {"electrode_length", c.geometry.electrode_length},
        {"electrode_gap", c.geometry.electrode_gap},
        {"dielectric_thickness", c.geometry.dielectric_thickness},
        {"substrate_overlap_length", c.geometry.substrate_overlap_length},
        {"substrate_width", c.geometry.substrate_width},
        {"substrate_thickness", c.geometry.substrate_thickness},
    };
    j["dielectric"] = {
        {"kappa_inf", c.dielectric.kappa_inf}, {"kappa_s", c.dielectric.kappa_s},
        {"tau", c.dielectric.tau},             {"alpha", c.dielectric.alpha},
        {"density", c.dielectric.density},     {"thickness", c.dielectric.thickness},
        {"conductivity", c.dielectric.conductivity},
    };
    j["contact"] = {{"stiffness_k", c.contact.stiffness_k}, {"sigma_d", c.contact.sigma_d}};
    j["drive"] = {
        {"waveform", waveform_name(c.drive.waveform)},
        {"amplitude", c.drive.amplitude},
        {"frequency", c.drive.frequency},
        {"tau_rise", c.drive.tau_rise},
        {"tau_fall", c.drive.tau_fall},
    };
    j["air"] = {{"viscosity", c.air.viscosity}};
    j["averaging"] = {{"truncation_sigmas", c.averaging.truncation_sigmas},
                      {"damping_floor", c.averaging.damping_floor}};
    j["lambda"] = {
        {"law", law_name(c.lambda.law)},        {"fixed_value", c.lambda.fixed_value},
        {"intercept", c.lambda.intercept},      {"slope", c.lambda.slope},
        {"instantaneous", c.lambda.instantaneous},
    };
    j["m_d"] = c.m_d;
    j["m_s"] = c.m_s;
    j["substrate_density"] = c.substrate_density;
    j["f_preload"] = c.f_preload;
    j["mu_d_static"] = c.mu_d_static;
    j["mu_d_kinetic"] = c.mu_d_kinetic;
    j["mu_base_static"] = c.mu_base_static;
    j["mu_base_kinetic"] = c.mu_base_kinetic;
    j["gravity"] = c.gravity;
    j["engage_threshold"] = c.engage_threshold;
    j["release_threshold"] = c.release_threshold;
    j["hold_time"] = c.hold_time;
    j["loadcell"] = {
        {"k_lc", rc.loadcell.k_lc},
        {"b_lc", rc.loadcell.b_lc},
        {"m_lc", rc.loadcell.m_lc},
        {"check_frequency", rc.loadcell.check_frequency},
    };
    j["force_ratio"] = rc.force_ratio;
    return j;
}

RunConfig run_config_from_json(const json& j) {
    RunConfig rc;
    ClutchConfig& c = rc.clutch;
    Section root(j, "");
    {
        Section s = root.sub("geometry");
        c.geometry.n_electrodes = s.integer("n_electrodes");
        c.geometry.electrode_length = s.num("electrode_length");
        c.geometry.electrode_gap = s.num("electrode_gap");
        c.geometry.dielectric_thickness = s.num("dielectric_thickness");
        c.geometry.substrate_overlap_length = s.num("substrate_overlap_length");
        c.geometry.substrate_width = s.num("substrate_width");
        c.geometry.substrate_thickness = s.num("substrate_thickness");
        s.finish();
    }
    {
        Section s = root.sub("dielectric");
        c.dielectric.kappa_inf = s.num("kappa_inf");
        c.dielectric.kappa_s = s.num("kappa_s");
        c.dielectric.tau = s.num("tau");
        c.dielectric.alpha = s.num("alpha");
        c.dielectric.density = s.num("density");
        c.dielectric.thickness = s.num("thickness");
        c.dielectric.conductivity = s.num("conductivity");
        s.finish();
    }
    {
        Section s = root.sub("contact");
        c.contact.stiffness_k = s.num("stiffness_k");
        c.contact.sigma_d = s.num("sigma_d");
        s.finish();
    }
    {
        Section s = root.sub("drive");
        const std::string w = s.str("waveform");
        if (w == "dc") {
            c.drive.waveform = Waveform::dc;
        } else if (w == "bipolar_square") {
            c.drive.waveform = Waveform::bipolar_square;
        } else {
            throw ConfigError(s.at("waveform"), "expected \"dc\" or \"bipolar_square\"");
        }
        c.drive.amplitude = s.num("amplitude");
        c.drive.frequency = s.num("frequency");
        c.drive.tau_rise = s.num("tau_rise");
        c.drive.tau_fall = s.num("tau_fall");
        s.finish();
    }
    {
        Section s = root.sub("air");
        c.air.viscosity = s.num("viscosity");
        s.finish();
    }
    {
        Section s = root.sub("averaging");
        c.averaging.truncation_sigmas = s.num("truncation_sigmas");
        c.averaging.damping_floor = s.num("damping_floor");
        s.finish();
    }
    {
        Section s = root.sub("lambda");
        const std::string law = s.str("law");
        if (law == "unity") {
            c.lambda.law = LambdaLaw::unity;
        } else if (law == "fixed") {
            c.lambda.law = LambdaLaw::fixed;
        } else if (law == "linear") {
            c.lambda.law = LambdaLaw::linear;
        } else {
            throw ConfigError(s.at("law"), "expected \"unity\", \"fixed\" or \"linear\"");
        }
        c.lambda.fixed_value = s.num("fixed_value");
        c.lambda.intercept = s.num("intercept");
        c.lambda.slope = s.num("slope");
        c.lambda.instantaneous = s.boolean("instantaneous");
        s.finish();
    }
    c.m_d = root.num("m_d");
    c.m_s = root.num("m_s");
    c.substrate_density = root.num("substrate_density");
    c.f_preload = root.num("f_preload");
    c.mu_d_static = root.num("mu_d_static");
    c.mu_d_kinetic = root.num("mu_d_kinetic");
    c.mu_base_static = root.num("mu_base_static");
    c.mu_base_kinetic = root.num("mu_base_kinetic");
    c.gravity = root.num("gravity");
    c.engage_threshold = root.num("engage_threshold");
    c.release_threshold = root.num("release_threshold");
    c.hold_time = root.num("hold_time");
    {
        Section s = root.sub("loadcell");
        rc.loadcell.k_lc = s.num("k_lc");
        rc.loadcell.b_lc = s.num("b_lc");
        rc.loadcell.m_lc = s.num("m_lc");
        rc.loadcell.check_frequency = s.num("check_frequency");
        s.finish();
    }
    rc.force_ratio = root.num("force_ratio");
    root.finish();

    c.validate();
    rc.loadcell.validate();
    if (!(rc.force_ratio > 0.0 && rc.force_ratio < 1.0)) throw ConfigError("force_ratio", "must lie in (0, 1)");
    return rc;
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key.path=value");
    const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(key)) throw ConfigError(path, "unknown field");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    *node = value;
}

std::string config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LoadedConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    LoadedConfig out;
    const std::string text = read_file(path);
    out.document = json::parse(text, nullptr, false);
    if (out.document.is_discarded()) throw ConfigError(path, "not valid JSON");
    for (const auto& o : overrides) apply_override(out.document, o);
    out.config = run_config_from_json(out.document);
    out.hash = config_hash(out.document);
    return out;
}

}  // namespace eaclutch::io
