#include "reachset/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifndef REACHSET_VERSION
#define REACHSET_VERSION "0.0.0"
#endif

namespace reachset {

using nlohmann::json;

std::string format_double(double v) {
    if (v == 0.0) return std::signbit(v) ? "-0" : "0";
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write to '" + path + "' failed");
}

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> endpoint_columns(Mode m) {
    switch (m) {
        case Mode::NoDir2D: return {"x", "y"};
        case Mode::Dir2D: return {"x", "y", "theta"};
        case Mode::NoDir3D: return {"x", "y", "z"};
        case Mode::Dir3D: return {"x", "y", "z", "ex", "ey", "ez"};
    }
    return {};
}

std::string header_line(const std::string& kind, Mode m, const RunConfig& cfg) {
    return "# reachset " + std::string(REACHSET_VERSION) + " " + kind + " mode=" + mode_name(m) +
           " config_hash=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed) + "\n";
}

json counts_json(const BoundaryCounts& c) {
    return {{"candidates", c.candidates}, {"dropped_singular", c.dropped_singular},
            {"removed_duplicates", c.removed_duplicates}, {"pmp_failed", c.pmp_failed},
            {"dominated", c.dominated}, {"witnesses", c.witnesses}, {"points", c.points}};
}

json config_tree(const RunConfig& cfg) { return json::parse(to_json(cfg)); }

}  // namespace

std::string candidate_json(const Candidate& c) {
    json j;
    j["family"] = family_name(c.family);
    switch (c.family) {
        case Family::S: break;
        case Family::C: j["s1"] = c.s1; break;
        case Family::CS: j["s1"] = c.s1; j["a1"] = c.a1; break;
        case Family::SC: j["s2"] = c.s2; j["a2"] = c.a2; break;
        case Family::CC: j["s1"] = c.s1; j["a1"] = c.a1; break;
        case Family::CSC:
            j["s1"] = c.s1;
            j["s2"] = c.s2;
            j["a1"] = c.a1;
            j["a2"] = c.a2;
            j["twist"] = c.twist;
            break;
        case Family::CCC:
            j["s1"] = c.s1;
            j["a1"] = c.a1;
            j["a2"] = c.a2;
            j["branch"] = branch_name(c.branch);
            break;
        case Family::H:
            j["zeta"] = c.helix.zeta;
            j["tau0"] = c.helix.tau0;
            j["taudot0"] = c.helix.taudot0;
            j["branch"] = branch_name(c.helix.branch);
            break;
    }
    j["psi"] = c.psi;
    return j.dump();
}

std::string boundary_csv(const BoundaryCloud& b, const RunConfig& cfg) {
    std::string s = header_line("boundary", b.mode, cfg);
    for (const auto& col : endpoint_columns(b.mode)) s += col + ",";
    s += "family,pmp_pass,gen_params_json\n";
    for (const auto& p : b.points) {
        for (double v : p.endpoint) s += format_double(v) + ",";
        s += p.family + "," + (p.pmp_pass ? "1" : "0") + "," + csv_quote(candidate_json(p.generator)) + "\n";
    }
    return s;
}

std::string boundary_metadata(const BoundaryCloud& b, const RunConfig& cfg) {
    json j;
    j["kind"] = "boundary";
    j["version"] = REACHSET_VERSION;
    j["mode"] = mode_name(b.mode);
    j["t_f"] = b.t_f;
    j["kappa_max"] = b.kappa_max;
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash(cfg);
    j["config"] = config_tree(cfg);
    j["counts"] = counts_json(b.counts);
    j["dominance"] = {{"eps_dom", b.settings.eps_dom_rel * b.t_f},
                      {"radius", b.settings.radius_rel * b.t_f},
                      {"cone_half_angle_deg", b.settings.cone_half_angle_deg},
                      {"note", "points with a reachable witness inside the outward cone are dropped; "
                               "PMP-sense extremals that are not topological boundary points can survive "
                               "where witnesses are sparse"}};
    json sup = json::array();
    for (const auto& r : b.supports)
        sup.push_back({{"direction", r.direction}, {"value", r.value}, {"family", r.family},
                       {"equivalence_pass", r.equivalence_pass}});
    j["supports"] = sup;
    return j.dump(2) + "\n";
}

std::string oracle_csv(const OracleCloud& oc, const RunConfig& cfg) {
    std::string s = header_line("oracle", oc.mode, cfg);
    const auto cols = endpoint_columns(oc.mode);
    for (size_t k = 0; k < cols.size(); ++k) s += cols[k] + (k + 1 < cols.size() ? "," : "\n");
    const int d = oc.points.dim;
    for (size_t i = 0; i < oc.points.size(); ++i) {
        const double* r = oc.points.row(i);
        for (int k = 0; k < d; ++k) s += format_double(r[k]) + (k + 1 < d ? "," : "\n");
    }
    return s;
}

std::string oracle_metadata(const OracleCloud& oc, const RunConfig& cfg) {
    json j;
    j["kind"] = "oracle";
    j["version"] = REACHSET_VERSION;
    j["mode"] = mode_name(oc.mode);
    j["t_f"] = oc.t_f;
    j["kappa_max"] = oc.kappa_max;
    j["seed"] = oc.seed;
    j["n_samples"] = oc.n_samples;
    j["n_pieces"] = oc.n_pieces;
    j["model"] = control_model_name(oc.model);
    j["config_hash"] = config_hash(cfg);
    j["config"] = config_tree(cfg);
    return j.dump(2) + "\n";
}

void write_boundary(const BoundaryCloud& b, const RunConfig& cfg) {
    write_text(cfg.out + ".boundary.csv", boundary_csv(b, cfg));
    write_text(cfg.out + ".boundary.json", boundary_metadata(b, cfg));
}

void write_oracle(const OracleCloud& oc, const RunConfig& cfg) {
    write_text(cfg.out + ".oracle.csv", oracle_csv(oc, cfg));
    write_text(cfg.out + ".oracle.json", oracle_metadata(oc, cfg));
}

namespace {

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("path file: missing '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_number()) throw InvalidInput(std::string("path file: '") + key + "' must be a number");
    return v.get<double>();
}

Vec3 vec3(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_array() || v.size() != 3) throw InvalidInput(std::string("path file: '") + key + "' must be [x, y, z]");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[static_cast<size_t>(i)].is_number())
            throw InvalidInput(std::string("path file: '") + key + "' must hold numbers");
        out[i] = v[static_cast<size_t>(i)].get<double>();
    }
    return out;
}

Eigen::VectorXd vecn(const json& v, const char* key) {
    if (!v.is_array()) throw InvalidInput(std::string("path file: '") + key + "' must be an array");
    Eigen::VectorXd out(static_cast<long>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw InvalidInput(std::string("path file: '") + key + "' must hold numbers");
        out[static_cast<long>(i)] = v[i].get<double>();
    }
    return out;
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw InvalidInput("path file: unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

PathSpec parse_path_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("path file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("path file: expected an object");
    only_keys(j, {"start", "kappa_max", "segments", "costate", "p0", "phi", "step", "grad_phi"}, "path");
    PathSpec ps;
    const json& st = need(j, "start");
    if (!st.is_object()) throw InvalidInput("path file: 'start' must be an object");
    ps.spatial = st.contains("r");
    const double k = number(j, "kappa_max");
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("path file: kappa_max must be positive");
    const json& segs = need(j, "segments");
    if (!segs.is_array() || segs.empty()) throw InvalidInput("path file: 'segments' must be a non-empty array");
    std::vector<Segment> out;
    for (const auto& sj : segs) {
        if (!sj.is_object()) throw InvalidInput("path file: segments must be objects");
        const json& kind = need(sj, "kind");
        if (!kind.is_string()) throw InvalidInput("path file: segment kind must be a string");
        const std::string kd = kind.get<std::string>();
        const double len = number(sj, "length");
        if (kd == "S") {
            only_keys(sj, {"kind", "length"}, "segment");
            out.push_back(Segment::straight(len));
        } else if (kd == "C") {
            if (ps.spatial) {
                only_keys(sj, {"kind", "length", "axis"}, "segment");
                out.push_back(Segment::arc(k, len, vec3(sj, "axis")));
            } else {
                only_keys(sj, {"kind", "length", "curvature"}, "segment");
                out.push_back(Segment::arc(number(sj, "curvature"), len));
            }
        } else if (kd == "H") {
            if (!ps.spatial) throw InvalidInput("path file: H segments need a spatial start");
            only_keys(sj, {"kind", "length", "zeta", "tau0", "taudot0", "binormal"}, "segment");
            const HParams h = HParams::from_zeta(number(sj, "zeta"), number(sj, "tau0"), number(sj, "taudot0"));
            out.push_back(Segment::helical(h, vec3(sj, "binormal"), len));
        } else {
            throw InvalidInput("path file: unknown segment kind '" + kd + "'");
        }
        validate_segment(out.back(), k, ps.spatial);
    }
    if (ps.spatial) {
        only_keys(st, {"r", "e"}, "start");
        ps.spatial_path.start = Config3{vec3(st, "r"), vec3(st, "e")};
        if (std::abs(ps.spatial_path.start.e.norm() - 1.0) > 1e-9)
            throw InvalidInput("path file: start.e must be a unit vector");
        ps.spatial_path.kappa_max = k;
        ps.spatial_path.segments = out;
    } else {
        only_keys(st, {"x", "y", "theta"}, "start");
        ps.planar.start = Config2{number(st, "x"), number(st, "y"), number(st, "theta")};
        ps.planar.kappa_max = k;
        ps.planar.segments = out;
    }
    const Eigen::VectorXd p = vecn(need(j, "costate"), "costate");
    const long n = ps.spatial ? 6 : 3;
    if (p.size() != n) throw InvalidInput("path file: costate must have " + std::to_string(n) + " entries");
    if (!p.allFinite()) throw InvalidInput("path file: costate must be finite");
    ps.p_tf = p;
    if (j.contains("p0")) ps.p0 = number(j, "p0");
    if (j.contains("phi")) ps.phi = number(j, "phi");
    if (j.contains("step")) ps.step = number(j, "step");
    if (j.contains("grad_phi")) {
        ps.grad_phi = vecn(j.at("grad_phi"), "grad_phi");
        if (ps.grad_phi->size() != n) throw InvalidInput("path file: grad_phi has the wrong length");
    }
    if (!(ps.p0 >= 0.0) || !std::isfinite(ps.phi) || !std::isfinite(ps.step) || ps.step < 0.0)
        throw InvalidInput("path file: need p0 >= 0, finite phi and step >= 0");
    return ps;
}

std::string pmp_report_json(const PmpReport& r, const TransversalityResult& tr, const RunConfig& cfg) {
    json j;
    j["version"] = REACHSET_VERSION;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["tol"] = r.tol;
    j["p0"] = r.p0;
    j["phi"] = r.phi;
    j["pointwise"] = {{"max_gap", r.max_pointwise_gap}, {"gap_time", r.gap_time}, {"pass", r.pointwise_pass}};
    j["constancy"] = {{"drift", r.hamiltonian_drift}, {"level", r.hamiltonian_level},
                      {"max_abs", r.max_abs_hamiltonian}, {"pass", r.constancy_pass}};
    j["transversality"] = {{"residual", tr.residual}, {"p0", tr.p0}, {"pass", tr.pass}};
    j["pass"] = r.pointwise_pass && r.constancy_pass && tr.pass;
    return j.dump(2) + "\n";
}

std::string pmp_check_json(const std::string& path_json, const RunConfig& cfg) {
    const PathSpec ps = parse_path_spec(path_json);
    const double len = ps.spatial ? ps.spatial_path.length() : ps.planar.length();
    const double step = ps.step > 0.0 ? ps.step : default_step(len);
    const CostateTraj cs = ps.spatial ? integrate_costate(ps.spatial_path, ps.p_tf, ps.p0, ps.phi, step)
                                      : integrate_costate(ps.planar, ps.p_tf, ps.p0, ps.phi, step);
    const PmpReport r = check_pointwise_max(cs, cfg.pmp.control_grid, cfg.pmp.tol);
    const Eigen::VectorXd g = ps.grad_phi ? *ps.grad_phi : Eigen::VectorXd(ps.p_tf);
    const TransversalityResult tr = check_transversality_reach(Eigen::VectorXd(cs.p.back()), g, cfg.pmp.tol);
    return pmp_report_json(r, tr, cfg);
}

std::string equiv_csv(const std::vector<EquivRow>& rows, const RunConfig& cfg) {
    std::string s = header_line("equiv", cfg.mode, cfg);
    const auto cols = endpoint_columns(cfg.mode);
    for (const auto& col : cols) s += "c_" + col + ",";
    s += "value,family,problem,reach_gap,time_optimal_gap,max_abs_h,pass\n";
    for (const auto& r : rows) {
        for (double v : r.direction) s += format_double(v) + ",";
        s += format_double(r.support.value) + "," + r.support.family + "," + problem_type_name(r.report.problem) +
             "," + format_double(r.report.reach.max_pointwise_gap) + "," +
             format_double(r.report.time_optimal.max_pointwise_gap) + "," +
             format_double(r.report.time_optimal.max_abs_hamiltonian) + "," + (r.report.pass ? "1" : "0") + "\n";
    }
    return s;
}

}  // namespace reachset
