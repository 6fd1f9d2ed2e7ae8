#include "degenwarp/spec_file.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "degenwarp/errors.hpp"

namespace degenwarp {

namespace {

using json = nlohmann::json;

std::string child(const std::string& path, const std::string& key) {
    std::string k;
    for (char c : key) {
        if (c == '~') k += "~0";
        else if (c == '/') k += "~1";
        else k += c;
    }
    return path + "/" + k;
}

std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

std::string expr_source(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw SpecError(path, "expected an expression string");
}

Expression parse_at(const json& v, const std::string& path, const std::vector<std::string>& coords) {
    const std::string src = expr_source(v, path);
    try {
        return parse(src, coords);
    } catch (const Error& e) {
        throw SpecError(path, e.what());
    }
}

const json& require(const json& doc, const std::string& key, const std::string& path) {
    if (!doc.contains(key)) throw SpecError(child(path, key), "missing key");
    return doc.at(key);
}

std::vector<std::string> read_coords(const json& doc, const std::string& path) {
    const json& c = require(doc, "coords", path);
    const std::string cp = child(path, "coords");
    if (!c.is_array() || c.empty()) throw SpecError(cp, "expected a non-empty array of names");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c[i].is_string()) throw SpecError(child(cp, i), "expected a coordinate name");
        out.push_back(c[i].get<std::string>());
    }
    return out;
}

std::vector<ParityConstraint> read_parity(const json& doc, const std::string& path,
                                          const std::vector<std::string>& coords) {
    std::vector<ParityConstraint> out;
    if (!doc.contains("parity")) return out;
    const std::string pp = child(path, "parity");
    const json& arr = doc.at("parity");
    if (!arr.is_array()) throw SpecError(pp, "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string ip = child(pp, i);
        const json& e = arr[i];
        if (!e.is_object()) throw SpecError(ip, "expected {\"coord\": name, \"parity\": \"even\"|\"odd\"}");
        const json& c = require(e, "coord", ip);
        if (!c.is_string() || std::find(coords.begin(), coords.end(), c.get<std::string>()) == coords.end())
            throw SpecError(child(ip, "coord"), "unknown coordinate");
        const json& p = require(e, "parity", ip);
        if (!p.is_string() || (p != "even" && p != "odd")) throw SpecError(child(ip, "parity"), "expected \"even\" or \"odd\"");
        out.push_back({c.get<std::string>(), p == "even" ? Parity::Even : Parity::Odd});
    }
    return out;
}

std::size_t index_token(const std::string& tok, const std::vector<std::string>& coords, const std::string& path) {
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i] == tok) return i;
    std::size_t pos = 0;
    try {
        const unsigned long v = std::stoul(tok, &pos);
        if (pos == tok.size() && v < coords.size()) return v;
    } catch (const std::exception&) {
    }
    throw SpecError(path, "bad index '" + tok + "' (expected 0-based index or coordinate name)");
}

MetricSpec load(const json& doc, const std::string& path);

void check_dims(const json& doc, const std::string& path, const MetricField& g) {
    if (doc.contains("dim") && (!doc.at("dim").is_number_integer() || doc.at("dim").get<long>() != long(g.dim())))
        throw SpecError(child(path, "dim"), "does not match the metric dimension " + std::to_string(g.dim()));
    if (doc.contains("coords") && read_coords(doc, path) != g.chart().coord_names())
        throw SpecError(child(path, "coords"), "does not match the metric coordinates");
}

MetricSpec load(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw SpecError(path.empty() ? "/" : path, "expected a JSON object");
    static const std::set<std::string> known = {"dim", "coords", "metric", "diagonal_roots", "parity", "warp", "model"};
    for (const auto& [k, v] : doc.items())
        if (!known.count(k)) throw SpecError(child(path, k), "unknown key");
    int kinds = 0;
    for (const char* k : {"metric", "diagonal_roots", "warp", "model"}) kinds += doc.contains(k);
    if (kinds != 1)
        throw SpecError(path.empty() ? "/" : path,
                        "exactly one of \"metric\", \"diagonal_roots\", \"warp\", \"model\" is required");

    MetricSpec out;
    if (doc.contains("model")) {
        const std::string mp = child(path, "model");
        const json& m = doc.at("model");
        if (!m.is_object()) throw SpecError(mp, "expected {\"name\": ..., \"params\": {...}}");
        for (const auto& [k, v] : m.items())
            if (k != "name" && k != "params") throw SpecError(child(mp, k), "unknown key");
        const json& name = require(m, "name", mp);
        if (!name.is_string()) throw SpecError(child(mp, "name"), "expected a model name");
        std::map<std::string, std::string> params;
        if (m.contains("params")) {
            const std::string pp = child(mp, "params");
            if (!m.at("params").is_object()) throw SpecError(pp, "expected an object");
            for (const auto& [k, v] : m.at("params").items()) params[k] = expr_source(v, child(pp, k));
        }
        try {
            out.model = catalog(name.get<std::string>(), params);
        } catch (const ModelError& e) {
            throw SpecError(mp, e.what());
        }
        out.metric = out.model->metric;
        out.warped = out.model->warped;
        check_dims(doc, path, out.metric);
        return out;
    }
    if (doc.contains("warp")) {
        const std::string wp = child(path, "warp");
        const json& w = doc.at("warp");
        if (!w.is_object()) throw SpecError(wp, "expected {\"base\", \"fiber\", \"f\"}");
        for (const auto& [k, v] : w.items())
            if (k != "base" && k != "fiber" && k != "f") throw SpecError(child(wp, k), "unknown key");
        const MetricSpec base = load(require(w, "base", wp), child(wp, "base"));
        const MetricSpec fiber = load(require(w, "fiber", wp), child(wp, "fiber"));
        const Expression f = parse_at(require(w, "f", wp), child(wp, "f"), base.metric.chart().coord_names());
        try {
            out.warped = build(base.metric, fiber.metric, f);
        } catch (const NameClash& e) {
            throw SpecError(wp, e.what());
        }
        out.metric = out.warped->product;
        check_dims(doc, path, out.metric);
        return out;
    }

    const std::vector<std::string> coords = read_coords(doc, path);
    const json& dim = require(doc, "dim", path);
    if (!dim.is_number_integer() || dim.get<long>() != long(coords.size()))
        throw SpecError(child(path, "dim"), "must equal the number of coordinates");
    Chart chart;
    try {
        chart = Chart(coords, read_parity(doc, path, coords));
    } catch (const NameClash& e) {
        throw SpecError(child(path, "coords"), e.what());
    }
    if (doc.contains("diagonal_roots")) {
        const std::string rp = child(path, "diagonal_roots");
        const json& arr = doc.at("diagonal_roots");
        if (!arr.is_array() || arr.size() != coords.size())
            throw SpecError(rp, "expected an array with one {\"sign\", \"alpha\"} per coordinate");
        std::vector<DiagonalRoot> roots;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string ip = child(rp, i);
            if (!arr[i].is_object()) throw SpecError(ip, "expected {\"sign\": 1|-1, \"alpha\": expr}");
            const json& s = require(arr[i], "sign", ip);
            if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
                throw SpecError(child(ip, "sign"), "expected 1 or -1");
            roots.push_back({s.get<int>(), parse_at(require(arr[i], "alpha", ip), child(ip, "alpha"), coords)});
        }
        out.metric = MetricField::from_roots(chart, std::move(roots));
    } else {
        const std::string mp = child(path, "metric");
        const json& m = doc.at("metric");
        if (!m.is_object()) throw SpecError(mp, "expected an object mapping \"a,b\" to expressions");
        std::map<std::pair<std::size_t, std::size_t>, Expression> entries;
        for (const auto& [k, v] : m.items()) {
            const std::string kp = child(mp, k);
            const auto comma = k.find(',');
            if (comma == std::string::npos) throw SpecError(kp, "key must be \"a,b\"");
            auto trim = [](std::string s) {
                s.erase(0, s.find_first_not_of(' '));
                s.erase(s.find_last_not_of(' ') + 1);
                return s;
            };
            std::size_t a = index_token(trim(k.substr(0, comma)), coords, kp);
            std::size_t b = index_token(trim(k.substr(comma + 1)), coords, kp);
            if (a > b) std::swap(a, b);
            if (entries.count({a, b})) throw SpecError(kp, "component given twice");
            entries[{a, b}] = parse_at(v, kp, coords);
        }
        out.metric = MetricField::from_components(chart, entries);
    }
    if (!chart.parity_constraints().empty()) {
        const ParityReport pr = validate_parity(out.metric);
        for (const auto& c : pr.checks)
            if (!c.pass) {
                char buf[48];
                std::snprintf(buf, sizeof buf, "%.3e", c.max_asymmetry);
                throw SpecError(child(path, "parity"), "metric is not " +
                                                           std::string(c.parity == Parity::Even ? "even" : "odd") +
                                                           " in " + c.coord + " (" + c.worst_component +
                                                           " asymmetry " + buf + ")");
            }
    }
    return out;
}

} // namespace

MetricSpec load_spec_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError("/", std::string("invalid JSON: ") + e.what());
    }
    return load(doc, "");
}

MetricSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("/", "cannot read spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_spec_text(ss.str());
}

} // namespace degenwarp
