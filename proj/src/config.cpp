#include "reachset/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace reachset {

using nlohmann::json;

std::string branch_name(Branch b) {
    switch (b) {
        case Branch::MinTime: return "min-time";
        case Branch::MaxTime: return "max-time";
        case Branch::Both: return "both";
    }
    return "?";
}

Branch parse_branch(const std::string& s) {
    if (s == "min-time") return Branch::MinTime;
    if (s == "max-time") return Branch::MaxTime;
    if (s == "both") return Branch::Both;
    throw InvalidInput("unknown branch '" + s + "'");
}

namespace {

// Reads one JSON object, remembering which keys were consumed so that the
// leftovers can be reported.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw InvalidInput(where_ + ": expected an object");
    }
    ~Reader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw InvalidInput("unknown key '" + path(it.key()) + "'");
    }

    bool has(const std::string& k) const { return j_.contains(k); }
    std::string path(const std::string& k) const { return where_.empty() ? k : where_ + "." + k; }

    const json* get(const std::string& k) {
        seen_.insert(k);
        auto it = j_.find(k);
        return it == j_.end() ? nullptr : &*it;
    }

    void num(const std::string& k, double& v) {
        if (const json* x = get(k)) {
            if (!x->is_number()) throw InvalidInput(path(k) + ": expected a number");
            v = x->get<double>();
        }
    }
    void integer(const std::string& k, int& v) {
        if (const json* x = get(k)) {
            if (!x->is_number_integer()) throw InvalidInput(path(k) + ": expected an integer");
            const auto w = x->get<long long>();
            if (w < -2147483647LL || w > 2147483647LL) throw InvalidInput(path(k) + ": out of range");
            v = static_cast<int>(w);
        }
    }
    void u64(const std::string& k, uint64_t& v) {
        if (const json* x = get(k)) {
            if (x->is_number_unsigned()) {
                v = x->get<uint64_t>();
            } else if (x->is_number_integer() && x->get<long long>() >= 0) {
                v = static_cast<uint64_t>(x->get<long long>());
            } else {
                throw InvalidInput(path(k) + ": expected a non-negative integer");
            }
        }
    }
    void boolean(const std::string& k, bool& v) {
        if (const json* x = get(k)) {
            if (!x->is_boolean()) throw InvalidInput(path(k) + ": expected true or false");
            v = x->get<bool>();
        }
    }
    void str(const std::string& k, std::string& v) {
        if (const json* x = get(k)) {
            if (!x->is_string()) throw InvalidInput(path(k) + ": expected a string");
            v = x->get<std::string>();
        }
    }
    void list(const std::string& k, std::vector<double>& v) {
        if (const json* x = get(k)) {
            if (!x->is_array()) throw InvalidInput(path(k) + ": expected an array");
            v.clear();
            for (const auto& e : *x) {
                if (!e.is_number()) throw InvalidInput(path(k) + ": expected numbers");
                v.push_back(e.get<double>());
            }
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

json num_list(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json to_tree(const RunConfig& c) {
    json j;
    j["mode"] = mode_name(c.mode);
    j["t_f"] = c.t_f;
    j["kappa_max"] = c.kappa_max;
    j["seed"] = c.seed;
    j["eps_in_rel"] = c.eps_in_rel;
    j["out"] = c.out;
    json g;
    g["arc_resolution"] = c.grid.arc_resolution;
    g["psi_resolution"] = c.grid.psi_resolution;
    g["twist_resolution"] = c.grid.twist_resolution;
    g["branch"] = branch_name(c.grid.branch);
    g["step"] = c.grid.step;
    g["h"] = {{"zeta", num_list(c.grid.h.zeta)},
              {"tau0", num_list(c.grid.h.tau0)},
              {"taudot0", num_list(c.grid.h.taudot0)}};
    j["grid"] = g;
    j["oracle"] = {{"n_samples", c.oracle.n_samples},
                   {"n_pieces", c.oracle.n_pieces},
                   {"model", control_model_name(c.oracle.model)}};
    const auto& b = c.boundary;
    j["boundary"] = {{"validation_samples", b.validation_samples},
                     {"validation_pieces", b.validation_pieces},
                     {"witness_samples", b.witness_samples},
                     {"witness_max_segments", b.witness_max_segments},
                     {"eps_dom_rel", b.eps_dom_rel},
                     {"radius_rel", b.radius_rel},
                     {"cone_half_angle_deg", b.cone_half_angle_deg},
                     {"support_directions", b.support_directions},
                     {"refine_supports", b.refine_supports},
                     {"tol_closed", b.tol_closed},
                     {"tol_integrated", b.tol_integrated},
                     {"control_grid_2d", b.control_grid_2d},
                     {"control_grid_3d", b.control_grid_3d}};
    j["equiv"] = {{"directions", c.equiv.directions}, {"tol", c.equiv.tol}, {"refine", c.equiv.refine}};
    j["pmp"] = {{"path_file", c.pmp.path_file}, {"tol", c.pmp.tol}, {"control_grid", c.pmp.control_grid}};
    return j;
}

void finite_positive(double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) throw InvalidInput(std::string(name) + " must be positive and finite");
}

void finite_nonneg(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput(std::string(name) + " must be finite and >= 0");
}

}  // namespace

void RunConfig::sync() {
    grid.t_f = t_f;
    grid.kappa_max = kappa_max;
    boundary.seed = seed;
}

void RunConfig::validate() const {
    finite_positive(t_f, "t_f");
    finite_positive(kappa_max, "kappa_max");
    finite_nonneg(eps_in_rel, "eps_in_rel");
    if (grid.t_f != t_f || grid.kappa_max != kappa_max || boundary.seed != seed)
        throw InvalidInput("config out of sync; call sync()");
    grid.validate();
    if (grid.arc_resolution > 4096 || grid.psi_resolution > 1024 || grid.twist_resolution > 256)
        throw InvalidGrid("grid resolution too large");
    for (double z : grid.h.zeta)
        if (!std::isfinite(z)) throw InvalidGrid("grid.h.zeta must be finite");
    for (double t : grid.h.tau0)
        if (!std::isfinite(t) || std::abs(t) < kTauMin) throw InvalidGrid("grid.h.tau0 entries need |tau0| >= 1e-6");
    for (double t : grid.h.taudot0)
        if (!std::isfinite(t)) throw InvalidGrid("grid.h.taudot0 must be finite");
    if (oracle.n_samples < 0) throw InvalidInput("oracle.n_samples must be >= 0");
    if (oracle.n_pieces < 1) throw InvalidInput("oracle.n_pieces must be >= 1");
    const auto& b = boundary;
    if (b.validation_samples < 0 || b.witness_samples < 0) throw InvalidInput("boundary sample counts must be >= 0");
    if (b.validation_pieces < 1 || b.witness_max_segments < 1)
        throw InvalidInput("boundary piece counts must be >= 1");
    finite_nonneg(b.eps_dom_rel, "boundary.eps_dom_rel");
    finite_positive(b.radius_rel, "boundary.radius_rel");
    if (!(b.cone_half_angle_deg > 0.0) || !(b.cone_half_angle_deg < 90.0))
        throw InvalidInput("boundary.cone_half_angle_deg must be in (0, 90)");
    if (b.support_directions < 0) throw InvalidInput("boundary.support_directions must be >= 0");
    finite_nonneg(b.tol_closed, "boundary.tol_closed");
    finite_nonneg(b.tol_integrated, "boundary.tol_integrated");
    if (b.control_grid_2d < 2 || b.control_grid_3d < 2) throw InvalidInput("control grids need >= 2 points");
    if (equiv.directions < 0) throw InvalidInput("equiv.directions must be >= 0");
    finite_nonneg(equiv.tol, "equiv.tol");
    finite_nonneg(pmp.tol, "pmp.tol");
    if (pmp.control_grid < 2) throw InvalidInput("pmp.control_grid needs >= 2 points");
    if (out.empty()) throw InvalidInput("out must not be empty");
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    {
        Reader r(j, "");
        std::string mode = mode_name(c.mode);
        r.str("mode", mode);
        c.mode = parse_mode(mode);
        r.num("t_f", c.t_f);
        r.num("kappa_max", c.kappa_max);
        r.u64("seed", c.seed);
        r.num("eps_in_rel", c.eps_in_rel);
        r.str("out", c.out);
        if (const json* g = r.get("grid")) {
            Reader rg(*g, "grid");
            rg.integer("arc_resolution", c.grid.arc_resolution);
            rg.integer("psi_resolution", c.grid.psi_resolution);
            rg.integer("twist_resolution", c.grid.twist_resolution);
            std::string br = branch_name(c.grid.branch);
            rg.str("branch", br);
            c.grid.branch = parse_branch(br);
            rg.num("step", c.grid.step);
            if (const json* h = rg.get("h")) {
                Reader rh(*h, "grid.h");
                rh.list("zeta", c.grid.h.zeta);
                rh.list("tau0", c.grid.h.tau0);
                rh.list("taudot0", c.grid.h.taudot0);
            }
        }
        if (const json* o = r.get("oracle")) {
            Reader ro(*o, "oracle");
            ro.integer("n_samples", c.oracle.n_samples);
            ro.integer("n_pieces", c.oracle.n_pieces);
            std::string model = control_model_name(c.oracle.model);
            ro.str("model", model);
            c.oracle.model = parse_control_model(model);
        }
        if (const json* b = r.get("boundary")) {
            Reader rb(*b, "boundary");
            auto& s = c.boundary;
            rb.integer("validation_samples", s.validation_samples);
            rb.integer("validation_pieces", s.validation_pieces);
            rb.integer("witness_samples", s.witness_samples);
            rb.integer("witness_max_segments", s.witness_max_segments);
            rb.num("eps_dom_rel", s.eps_dom_rel);
            rb.num("radius_rel", s.radius_rel);
            rb.num("cone_half_angle_deg", s.cone_half_angle_deg);
            rb.integer("support_directions", s.support_directions);
            rb.boolean("refine_supports", s.refine_supports);
            rb.num("tol_closed", s.tol_closed);
            rb.num("tol_integrated", s.tol_integrated);
            rb.integer("control_grid_2d", s.control_grid_2d);
            rb.integer("control_grid_3d", s.control_grid_3d);
        }
        if (const json* e = r.get("equiv")) {
            Reader re(*e, "equiv");
            re.integer("directions", c.equiv.directions);
            re.num("tol", c.equiv.tol);
            re.boolean("refine", c.equiv.refine);
        }
        if (const json* p = r.get("pmp")) {
            Reader rp(*p, "pmp");
            rp.str("path_file", c.pmp.path_file);
            rp.num("tol", c.pmp.tol);
            rp.integer("control_grid", c.pmp.control_grid);
        }
    }
    c.sync();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const RunConfig& c) { return to_tree(c).dump(2) + "\n"; }

// The output prefix says where results go, not what they are, so it stays out
// of the hash.
std::string config_hash(const RunConfig& c) {
    auto tree = to_tree(c);
    tree.erase("out");
    const std::string s = tree.dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_tree(a) == to_tree(b); }

}  // namespace reachset
