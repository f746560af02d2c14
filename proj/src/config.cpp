#include "vfdw/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "vfdw/error.hpp"

namespace vfdw {

using json = nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

// one-dimensional profile with derivative
struct Profile1D {
    std::function<double(double)> f;
    std::function<double(double)> df;  // empty for nodal-only data
    bool nodal_only = false;
};

Profile1D profile_1d(const std::string& name, double mid) {
    if (name == "one") return {[](double) { return 1.0; }, [](double) { return 0.0; }};
    if (name == "sin_pi") {
        return {[](double x) { return std::sin(pi * x); }, [](double x) { return pi * std::cos(pi * x); }};
    }
    if (name == "sin_2pi") {
        return {[](double x) { return std::sin(2 * pi * x); }, [](double x) { return 2 * pi * std::cos(2 * pi * x); }};
    }
    if (name == "poly2") {
        return {[](double x) { return x * x * (1 - x) * (1 - x); },
                [](double x) { return 2 * x * (1 - x) * (1 - 2 * x); }};
    }
    if (name == "poly4") {
        return {[](double x) { return std::pow(x * (1 - x), 4); },
                [](double x) { return 4 * std::pow(x * (1 - x), 3) * (1 - 2 * x); }};
    }
    if (name == "x_pow_m1_4") return {[](double x) { return std::pow(x, -0.25); }, nullptr, true};
    if (name == "indicator_half") return {[](double x) { return x > 0.0 && x <= 0.5 ? 1.0 : 0.0; }, nullptr, true};
    if (name == "gaussian_mid") {
        return {[mid](double x) { return std::exp(-0.5 * (x - mid) * (x - mid)); },
                [mid](double x) { return -(x - mid) * std::exp(-0.5 * (x - mid) * (x - mid)); }};
    }
    throw Error(Stage::config, "unknown data name '" + name + "'");
}

std::string format_number(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

struct Block {
    double alpha0;
    Scheme scheme;
    StudyAxis axis;
    int fixed;
    int first;
    int count;
};

struct TableDef {
    std::string name;
    std::string example;
    std::string description;
    std::vector<Block> blocks;
};

constexpr Scheme S1 = Scheme::alpha0_order;
constexpr Scheme S2 = Scheme::second_order;
constexpr StudyAxis TIME = StudyAxis::time;
constexpr StudyAxis SPACE = StudyAxis::space;

const std::vector<TableDef>& table_defs() {
    static const std::vector<TableDef> defs = {
        {"table1", "example1", "example1, alpha0-order scheme, time, J = 16",
         {{1.2, S1, TIME, 16, 1024, 5}, {1.5, S1, TIME, 16, 512, 5}, {1.9, S1, TIME, 16, 256, 5}}},
        {"table2", "example1", "example1, alpha0-order scheme, space, N = 32",
         {{1.2, S1, SPACE, 32, 32, 5}, {1.5, S1, SPACE, 32, 32, 5}, {1.9, S1, SPACE, 32, 32, 5}}},
        {"table3", "example2", "example2, second-order scheme, time, J = 32",
         {{1.2, S2, TIME, 32, 64, 5}, {1.4, S2, TIME, 32, 128, 5}, {1.7, S2, TIME, 32, 256, 5}}},
        {"table4", "example2", "example2, second-order scheme, space, N = 32",
         {{1.2, S2, SPACE, 32, 64, 5}, {1.4, S2, SPACE, 32, 64, 5}, {1.7, S2, SPACE, 32, 64, 5}}},
        {"table5", "example3a", "example3a (smooth data), both schemes, time, J = 32",
         {{1.4, S1, TIME, 32, 512, 4},
          {1.4, S2, TIME, 32, 512, 4},
          {1.85, S1, TIME, 32, 128, 4},
          {1.85, S2, TIME, 32, 128, 4}}},
        {"table6", "example3b", "example3b (nonsmooth data), both schemes, time, J = 32",
         {{1.4, S1, TIME, 32, 512, 4},
          {1.4, S2, TIME, 32, 512, 4},
          {1.85, S1, TIME, 32, 128, 4},
          {1.85, S2, TIME, 32, 128, 4}}},
        {"table7", "example4", "example4 (unit square), alpha0-order scheme, time (J = 32) and space (N = 32)",
         {{1.2, S1, TIME, 32, 256, 4},
          {1.2, S1, SPACE, 32, 16, 4},
          {1.9, S1, TIME, 32, 64, 4},
          {1.9, S1, SPACE, 32, 16, 4}}},
        {"table8", "example4", "example4 (unit square), second-order scheme, time (J = 32) and space (N = 32)",
         {{1.4, S2, TIME, 32, 256, 4},
          {1.4, S2, SPACE, 32, 16, 4},
          {1.85, S2, TIME, 32, 64, 4},
          {1.85, S2, SPACE, 32, 16, 4}}},
    };
    return defs;
}

std::string block_label(const TableDef& t, const Block& b) {
    bool mixed_scheme = false;
    bool mixed_axis = false;
    for (const Block& o : t.blocks) {
        mixed_scheme |= o.scheme != b.scheme;
        mixed_axis |= o.axis != b.axis;
    }
    std::string label = t.name;
    if (mixed_scheme) label += b.scheme == S1 ? "_s1" : "_s2";
    if (mixed_axis) label += b.axis == TIME ? "_t" : "_x";
    return label + "_" + alpha_tag(b.alpha0);
}

bool same_alpha(double a, double b) { return std::abs(a - b) < 1e-9; }

std::vector<int> parse_int_list(const std::string& text, const std::string& field) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw Error(Stage::config, field + ": '" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw Error(Stage::config, field + ": empty list");
    return out;
}

double parse_real(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Stage::config, field + ": '" + text + "' is not a number");
}

int parse_int(const std::string& text, const std::string& field) {
    const std::vector<int> v = parse_int_list(text, field);
    if (v.size() != 1) throw Error(Stage::config, field + ": expected a single integer");
    return v.front();
}

OutputFormats parse_formats(const std::vector<std::string>& names, const std::string& field) {
    OutputFormats f{false, false, false};
    for (const std::string& n : names) {
        if (n == "csv") f.csv = true;
        else if (n == "markdown" || n == "md") f.markdown = true;
        else if (n == "json") f.json = true;
        else throw Error(Stage::config, field + ": unknown format '" + n + "' (csv, markdown, json)");
    }
    return f;
}

// ----- JSON access with field paths -----

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw Error(Stage::config, path + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok) throw Error(Stage::config, "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double get_real(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw Error(Stage::config, join(path, key) + ": expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw Error(Stage::config, join(path, key) + ": expected an integer");
    return v.get<int>();
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_string()) throw Error(Stage::config, join(path, key) + ": expected a string");
    return v.get<std::string>();
}

std::vector<int> get_int_list(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_array()) throw Error(Stage::config, join(path, key) + ": expected an array of integers");
    std::vector<int> out;
    for (const json& e : v) {
        if (!e.is_number_integer()) throw Error(Stage::config, join(path, key) + ": expected an array of integers");
        out.push_back(e.get<int>());
    }
    return out;
}

std::array<double, 2> get_interval(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw Error(Stage::config, join(path, key) + ": expected [lower, upper]");
    }
    const std::array<double, 2> out{v[0].get<double>(), v[1].get<double>()};
    if (!(out[0] < out[1])) throw Error(Stage::config, join(path, key) + ": lower bound must be below upper bound");
    return out;
}

template <typename F>
auto with_field(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(Stage::config, field + ": " + e.what());
    }
}

ExponentFunction parse_exponent(const json& e, const std::string& path, double horizon) {
    check_keys(e, path, {"family", "alpha0", "c", "p", "amplitude", "z1", "z2", "length"});
    const std::string family = e.contains("family") ? get_string(e, path, "family") : "constant";
    auto num = [&](const char* key, double fallback) { return e.contains(key) ? get_real(e, path, key) : fallback; };
    return with_field(path, [&] {
        if (family == "constant") return ExponentFunction::constant(num("alpha0", 1.5), horizon);
        if (family == "poly_offset") {
            return ExponentFunction::poly_offset(num("alpha0", 1.5), num("c", 0.0), num("p", 3.0), horizon);
        }
        if (family == "sine_offset") return ExponentFunction::sine_offset(num("alpha0", 1.5), num("amplitude", 0.0), horizon);
        if (family == "transition") {
            return ExponentFunction::transition(num("z1", 1.4), num("z2", 1.9), num("length", horizon), horizon);
        }
        throw Error(Stage::config, "unknown family '" + family + "' (constant, poly_offset, sine_offset, transition)");
    });
}

TemporalFactor parse_time_factor(const json& src, const std::string& path) {
    const std::string kind = src.contains("time") ? get_string(src, path, "time") : "one";
    if (kind == "zero") return TemporalFactor::zero();
    if (kind == "one") return TemporalFactor::one();
    if (kind == "exp") {
        const double rate = src.contains("rate") ? get_real(src, path, "rate") : 1.0;
        return with_field(join(path, "rate"), [&] { return TemporalFactor::exponential(rate); });
    }
    throw Error(Stage::config, join(path, "time") + ": unknown time factor '" + kind + "' (zero, one, exp)");
}

ProblemSpec parse_problem(const json& p, const std::string& path) {
    check_keys(p, path, {"name", "exponent", "kappa", "T", "domain", "u0", "ubar0", "source"});
    ProblemSpec spec;
    spec.name = p.contains("name") ? get_string(p, path, "name") : "custom";
    if (p.contains("kappa")) spec.kappa = get_real(p, path, "kappa");
    if (p.contains("T")) spec.T = get_real(p, path, "T");
    if (p.contains("domain")) {
        const std::string dpath = join(path, "domain");
        const json& d = p.at("domain");
        check_keys(d, dpath, {"dim", "x", "y"});
        if (d.contains("dim")) spec.domain.dim = get_int(d, dpath, "dim");
        if (spec.domain.dim != 1 && spec.domain.dim != 2) throw Error(Stage::config, join(dpath, "dim") + ": must be 1 or 2");
        if (d.contains("x")) spec.domain.x = get_interval(d, dpath, "x");
        if (d.contains("y")) spec.domain.y = get_interval(d, dpath, "y");
    }
    const json none = json::object();
    spec.exponent = parse_exponent(p.contains("exponent") ? p.at("exponent") : none, join(path, "exponent"), spec.T);
    auto data = [&](const char* key) {
        if (!p.contains(key)) return SpatialFunction::zero();
        const std::string name = get_string(p, path, key);
        return with_field(join(path, key), [&] { return named_data(name, spec.domain); });
    };
    spec.u0 = data("u0");
    spec.ubar0 = data("ubar0");
    if (p.contains("source")) {
        const std::string spath = join(path, "source");
        const json& s = p.at("source");
        check_keys(s, spath, {"profile", "time", "rate"});
        const std::string profile = s.contains("profile") ? get_string(s, spath, "profile") : "one";
        spec.source_profile = with_field(join(spath, "profile"), [&] { return named_data(profile, spec.domain); });
        spec.source_time = parse_time_factor(s, spath);
        if (spec.source_profile.is_zero()) spec.source_time = TemporalFactor::zero();
    }
    with_field(path, [&] {
        spec.validate();
        return 0;
    });
    return spec;
}

std::string make_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_file(ExecutionResult& result, const std::string& dir, const std::string& name, const std::string& body) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Stage::report, "cannot create output directory '" + dir + "': " + ec.message());
    const std::string path = make_path(dir, name);
    std::ofstream out(path, std::ios::binary);
    out << body;
    out.close();
    if (!out) throw Error(Stage::report, "cannot write '" + path + "'");
    result.files.push_back(path);
}

const TableDef* find_table(const std::string& name) {
    for (const TableDef& t : table_defs()) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

bool is_example(const std::string& name) {
    const auto& names = example_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

// problem and default alpha0 for preset-driven single runs
ProblemSpec preset_problem(const RunConfig& c) {
    const std::string& p = *c.preset;
    std::string example = p;
    if (const TableDef* t = find_table(p)) example = t->example;
    if (!is_example(example)) throw Error(Stage::config, "preset '" + p + "' does not name a problem");
    double alpha0 = 1.5;
    if (c.alpha0) {
        alpha0 = *c.alpha0;
    } else {
        for (const TableDef& t : table_defs()) {
            if (t.example == example) {
                alpha0 = t.blocks.front().alpha0;
                break;
            }
        }
    }
    return example_problem(example, alpha0);
}

std::string solution_csv(const Mesh& mesh, const Vector& u) {
    std::ostringstream os;
    const int n = mesh.interior_per_axis();
    if (mesh.dim() == 1) {
        os << "x,u\n";
        for (int i = 1; i <= n; ++i) os << format_number("%.10g", mesh.x_node(i)) << ',' << format_number("%.12e", u[i - 1]) << '\n';
    } else {
        os << "x,y,u\n";
        for (int j = 1; j <= n; ++j) {
            for (int i = 1; i <= n; ++i) {
                os << format_number("%.10g", mesh.x_node(i)) << ',' << format_number("%.10g", mesh.y_node(j)) << ','
                   << format_number("%.12e", u[(j - 1) * n + (i - 1)]) << '\n';
            }
        }
    }
    return os.str();
}

std::string rate_text(const std::optional<double>& r) { return r ? format_number("%.3f", *r) : std::string("n/a"); }

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& data_names() {
    static const std::vector<std::string> names = {"zero",  "one",         "sin_pi",         "sin_2pi",     "poly2",
                                                   "poly4", "x_pow_m1_4", "indicator_half", "gaussian_mid"};
    return names;
}

SpatialFunction named_data(const std::string& name, const Domain& domain) {
    if (name == "zero") return SpatialFunction::zero();
    if (domain.dim == 1) {
        const Profile1D p = profile_1d(name, 0.5 * (domain.x[0] + domain.x[1]));
        SpatialFunction s;
        s.value = [f = p.f](double x, double) { return f(x); };
        if (p.df) s.gradient = [df = p.df](double x, double) { return std::array<double, 2>{df(x), 0.0}; };
        s.nodal_only = p.nodal_only;
        return s;
    }
    const Profile1D px = profile_1d(name, 0.5 * (domain.x[0] + domain.x[1]));
    const Profile1D py = profile_1d(name, 0.5 * (domain.y[0] + domain.y[1]));
    SpatialFunction s;
    s.value = [fx = px.f, fy = py.f](double x, double y) { return fx(x) * fy(y); };
    if (px.df) {
        s.gradient = [px, py](double x, double y) {
            return std::array<double, 2>{px.df(x) * py.f(y), px.f(x) * py.df(y)};
        };
    }
    s.nodal_only = px.nodal_only;
    return s;
}

const std::vector<std::string>& example_names() {
    static const std::vector<std::string> names = {"example1", "example2", "example3a", "example3b", "example4"};
    return names;
}

ProblemSpec example_problem(const std::string& name, double alpha0) {
    ProblemSpec p;
    p.kappa = 1.0;
    p.name = name;
    auto build = [&] {
        if (name == "example1") {
            p.T = 0.5;
            p.exponent = ExponentFunction::poly_offset(alpha0, 0.5, 3.0, p.T);
            p.u0 = named_data("sin_pi", p.domain);
            p.ubar0 = named_data("sin_2pi", p.domain);
        } else if (name == "example2") {
            p.T = 1.0;
            p.exponent = ExponentFunction::poly_offset(alpha0, 0.25, 3.0, p.T);
            p.u0 = named_data("poly4", p.domain);
            p.ubar0 = named_data("poly2", p.domain);
        } else if (name == "example3a" || name == "example3b") {
            p.T = 1.0;
            p.exponent = ExponentFunction::sine_offset(alpha0, 1.0 / 8.0, p.T);
            const bool smooth = name == "example3a";
            p.u0 = named_data(smooth ? "sin_pi" : "x_pow_m1_4", p.domain);
            p.ubar0 = named_data(smooth ? "poly2" : "indicator_half", p.domain);
            p.source_profile = named_data("one", p.domain);
            p.source_time = TemporalFactor::one();
        } else if (name == "example4") {
            p.T = 1.0;
            p.domain.dim = 2;
            p.exponent = ExponentFunction::sine_offset(alpha0, 1.0 / 9.0, p.T);
            p.u0 = named_data("sin_pi", p.domain);
            p.ubar0 = named_data("poly2", p.domain);
            p.source_profile = named_data("one", p.domain);
            p.source_time = TemporalFactor::one();
        } else {
            throw Error(Stage::config, "unknown example '" + name + "'");
        }
    };
    try {
        build();
    } catch (const Error& e) {
        throw Error(Stage::config, name + " with alpha0 = " + format_number("%g", alpha0) + ": " + e.what());
    }
    return p;
}

const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog = [] {
        std::vector<PresetInfo> c;
        for (const TableDef& t : table_defs()) c.push_back({t.name, t.description});
        c.push_back({"fig1", "transition demo: alpha 1.9, 1.4 and 1.9 -> 1.4 on [0,1], traces at x = 1"});
        return c;
    }();
    return catalog;
}

std::string alpha_tag(double alpha0) {
    std::string digits = format_number("%.2f", alpha0);
    while (digits.back() == '0') digits.pop_back();
    std::string tag = "a";
    for (char ch : digits) {
        if (ch != '.') tag.push_back(ch);
    }
    return tag;
}

std::vector<StudySpec> preset_studies(const std::string& preset, std::optional<double> alpha0) {
    std::vector<const TableDef*> tables;
    if (const TableDef* t = find_table(preset)) {
        tables.push_back(t);
    } else if (is_example(preset)) {
        for (const TableDef& t : table_defs()) {
            if (t.example == preset) tables.push_back(&t);
        }
    } else {
        throw Error(Stage::config, "preset '" + preset + "' has no convergence studies");
    }

    std::vector<StudySpec> studies;
    std::vector<double> available;
    for (const TableDef* t : tables) {
        for (const Block& b : t->blocks) {
            if (std::none_of(available.begin(), available.end(), [&](double a) { return same_alpha(a, b.alpha0); })) {
                available.push_back(b.alpha0);
            }
            if (alpha0 && !same_alpha(*alpha0, b.alpha0)) continue;
            StudySpec s;
            s.label = block_label(*t, b);
            s.problem = example_problem(t->example, b.alpha0);
            s.scheme = b.scheme;
            s.axis = b.axis;
            s.fixed = b.fixed;
            for (int k = 0; k < b.count; ++k) s.levels.push_back(b.first << k);
            studies.push_back(std::move(s));
        }
    }
    if (studies.empty()) {
        std::string list;
        for (double a : available) list += (list.empty() ? "" : ", ") + format_number("%g", a);
        throw Error(Stage::config, "preset '" + preset + "' has no block with alpha0 = " +
                                       format_number("%g", *alpha0) + " (available: " + list + ")");
    }
    return studies;
}

Scheme parse_scheme(const std::string& text) {
    if (text == "alpha0-order" || text == "alpha0_order" || text == "1") return Scheme::alpha0_order;
    if (text == "second-order" || text == "second_order" || text == "2") return Scheme::second_order;
    throw Error(Stage::config, "unknown scheme '" + text + "' (alpha0-order, second-order)");
}

StudyAxis parse_axis(const std::string& text) {
    if (text == "time") return StudyAxis::time;
    if (text == "space") return StudyAxis::space;
    throw Error(Stage::config, "unknown axis '" + text + "' (time, space)");
}

const char* command_name(Command c) {
    switch (c) {
        case Command::convergence: return "convergence";
        case Command::transition: return "transition";
        case Command::weights_dump: return "weights-dump";
        case Command::single_run: return "single-run";
    }
    return "unknown";
}

Command parse_command(const std::string& text) {
    if (text == "convergence") return Command::convergence;
    if (text == "transition") return Command::transition;
    if (text == "weights-dump") return Command::weights_dump;
    if (text == "single-run") return Command::single_run;
    throw Error(Stage::config, "unknown command '" + text + "' (convergence, transition, weights-dump, single-run)");
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte > 0 ? byte - 1 : 0), '\n');
        throw Error(Stage::config, "config syntax error at line " + std::to_string(line) + ": " + e.what());
    }

    RunConfig c;
    check_keys(doc, "", {"command", "preset", "alpha0", "threads", "problem", "discretization", "quadrature",
                         "transition", "weights", "output"});
    if (doc.contains("command")) c.command = parse_command(get_string(doc, "", "command"));
    if (doc.contains("preset")) set_option(c, "preset", get_string(doc, "", "preset"));
    if (doc.contains("alpha0")) c.alpha0 = get_real(doc, "", "alpha0");
    if (doc.contains("threads")) {
        c.threads = get_int(doc, "", "threads");
        if (c.threads < 1) throw Error(Stage::config, "threads: must be at least 1");
    }

    if (doc.contains("problem")) {
        const json& p = doc.at("problem");
        if (p.is_object() && p.contains("example")) {
            check_keys(p, "problem", {"example"});
            const std::string ex = get_string(p, "problem", "example");
            if (!is_example(ex)) throw Error(Stage::config, "problem.example: unknown example '" + ex + "'");
            if (c.preset) throw Error(Stage::config, "problem.example: conflicts with preset");
            c.preset = ex;
        } else {
            c.problem = parse_problem(p, "problem");
        }
    }

    if (doc.contains("discretization")) {
        const json& d = doc.at("discretization");
        check_keys(d, "discretization", {"scheme", "axis", "J", "N", "N_list", "J_list"});
        if (d.contains("scheme")) {
            c.scheme = with_field("discretization.scheme", [&] { return parse_scheme(get_string(d, "discretization", "scheme")); });
        }
        if (d.contains("axis")) {
            c.axis = with_field("discretization.axis", [&] { return parse_axis(get_string(d, "discretization", "axis")); });
        }
        if (d.contains("J")) c.J = get_int(d, "discretization", "J");
        if (d.contains("N")) c.N = get_int(d, "discretization", "N");
        if (d.contains("N_list")) c.N_list = get_int_list(d, "discretization", "N_list");
        if (d.contains("J_list")) c.J_list = get_int_list(d, "discretization", "J_list");
        if (c.J && *c.J < 2) throw Error(Stage::config, "discretization.J: must be at least 2");
        if (c.N && *c.N < 1) throw Error(Stage::config, "discretization.N: must be at least 1");
    }

    if (doc.contains("quadrature")) {
        const json& q = doc.at("quadrature");
        check_keys(q, "quadrature", {"rel_tol", "base_nodes", "max_nodes"});
        if (q.contains("rel_tol")) c.options.g_rel_tol = get_real(q, "quadrature", "rel_tol");
        if (q.contains("base_nodes")) c.options.g_base_nodes = get_int(q, "quadrature", "base_nodes");
        if (q.contains("max_nodes")) c.options.g_max_nodes = get_int(q, "quadrature", "max_nodes");
        if (!(c.options.g_rel_tol > 0.0)) throw Error(Stage::config, "quadrature.rel_tol: must be positive");
        if (c.options.g_base_nodes < 2 || c.options.g_max_nodes < c.options.g_base_nodes) {
            throw Error(Stage::config, "quadrature: need 2 <= base_nodes <= max_nodes");
        }
    }

    if (doc.contains("transition")) {
        const json& t = doc.at("transition");
        const std::string path = "transition";
        check_keys(t, path, {"T", "J", "N", "alpha_high", "alpha_low", "transition_time", "scheme"});
        TransitionConfig& tc = c.transition;
        if (t.contains("T")) tc.T = get_real(t, path, "T");
        if (t.contains("J")) tc.J = get_int(t, path, "J");
        if (t.contains("N")) tc.N = get_int(t, path, "N");
        if (t.contains("alpha_high")) tc.alpha_high = get_real(t, path, "alpha_high");
        if (t.contains("alpha_low")) tc.alpha_low = get_real(t, path, "alpha_low");
        if (t.contains("transition_time")) tc.transition_time = get_real(t, path, "transition_time");
        if (t.contains("scheme")) tc.scheme = with_field("transition.scheme", [&] { return parse_scheme(get_string(t, path, "scheme")); });
        if (tc.J < 2 || tc.N < 1) throw Error(Stage::config, "transition: need J >= 2 and N >= 1");
    }

    if (doc.contains("weights")) {
        const json& w = doc.at("weights");
        check_keys(w, "weights", {"abar", "n"});
        if (w.contains("abar")) c.weights_abar = get_real(w, "weights", "abar");
        if (w.contains("n")) c.weights_n = get_int(w, "weights", "n");
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        check_keys(o, "output", {"directory", "formats"});
        if (o.contains("directory")) c.out_dir = get_string(o, "output", "directory");
        if (o.contains("formats")) {
            const json& f = o.at("formats");
            if (!f.is_array()) throw Error(Stage::config, "output.formats: expected an array of strings");
            std::vector<std::string> names;
            for (const json& e : f) {
                if (!e.is_string()) throw Error(Stage::config, "output.formats: expected an array of strings");
                names.push_back(e.get<std::string>());
            }
            c.formats = parse_formats(names, "output.formats");
        }
    }
    return c;
}

void set_option(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "command") {
        c.command = parse_command(value);
    } else if (key == "preset") {
        const bool known = value == "fig1" || find_table(value) != nullptr || is_example(value);
        if (!known) throw Error(Stage::config, "preset: unknown preset '" + value + "' (see --list-presets)");
        c.preset = value;
    } else if (key == "alpha0") {
        c.alpha0 = parse_real(value, key);
    } else if (key == "scheme") {
        c.scheme = with_field(key, [&] { return parse_scheme(value); });
    } else if (key == "axis") {
        c.axis = with_field(key, [&] { return parse_axis(value); });
    } else if (key == "J") {
        c.J = parse_int(value, key);
        if (*c.J < 2) throw Error(Stage::config, "J: must be at least 2");
    } else if (key == "N") {
        c.N = parse_int(value, key);
        if (*c.N < 1) throw Error(Stage::config, "N: must be at least 1");
    } else if (key == "N-list") {
        c.N_list = parse_int_list(value, key);
    } else if (key == "J-list") {
        c.J_list = parse_int_list(value, key);
    } else if (key == "out-dir") {
        if (value.empty()) throw Error(Stage::config, "out-dir: empty path");
        c.out_dir = value;
    } else if (key == "format") {
        std::vector<std::string> names;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
        c.formats = parse_formats(names, key);
    } else if (key == "threads") {
        c.threads = parse_int(value, key);
        if (c.threads < 1) throw Error(Stage::config, "threads: must be at least 1");
    } else if (key == "rel-tol") {
        c.options.g_rel_tol = parse_real(value, key);
        if (!(c.options.g_rel_tol > 0.0)) throw Error(Stage::config, "rel-tol: must be positive");
    } else if (key == "abar") {
        c.weights_abar = parse_real(value, key);
    } else if (key == "n") {
        c.weights_n = parse_int(value, key);
    } else {
        throw Error(Stage::config, "unknown option '" + key + "'");
    }
}

std::vector<StudySpec> resolve_studies(const RunConfig& c) {
    std::vector<StudySpec> studies;
    if (c.preset) {
        if (*c.preset == "fig1") throw Error(Stage::config, "preset fig1 belongs to the transition command");
        studies = preset_studies(*c.preset, c.alpha0);
        auto keep = [&](const StudySpec& s) {
            return (!c.scheme || s.scheme == *c.scheme) && (!c.axis || s.axis == *c.axis);
        };
        std::vector<StudySpec> kept;
        for (StudySpec& s : studies) {
            if (keep(s)) kept.push_back(std::move(s));
        }
        if (kept.empty()) throw Error(Stage::config, "no study of preset '" + *c.preset + "' matches the scheme/axis filter");
        studies = std::move(kept);
        for (StudySpec& s : studies) {
            if (s.axis == StudyAxis::time) {
                if (c.J) s.fixed = *c.J;
                if (!c.N_list.empty()) s.levels = c.N_list;
            } else {
                if (c.N) s.fixed = *c.N;
                if (!c.J_list.empty()) s.levels = c.J_list;
            }
        }
    } else {
        if (!c.problem) throw Error(Stage::config, "problem: convergence needs a preset or a problem block");
        StudySpec s;
        s.problem = *c.problem;
        s.scheme = c.scheme.value_or(Scheme::alpha0_order);
        s.axis = c.axis.value_or(StudyAxis::time);
        if (s.axis == StudyAxis::time) {
            s.fixed = c.J.value_or(16);
            s.levels = c.N_list;
            if (s.levels.empty()) throw Error(Stage::config, "N_list: a time study needs refinement levels");
        } else {
            s.fixed = c.N.value_or(32);
            s.levels = c.J_list;
            if (s.levels.empty()) throw Error(Stage::config, "J_list: a space study needs refinement levels");
        }
        s.label = s.problem.name + "_" + axis_name(s.axis) + (s.scheme == Scheme::alpha0_order ? "_s1" : "_s2");
        studies.push_back(std::move(s));
    }
    for (StudySpec& s : studies) {
        s.options = c.options;
        s.threads = c.threads;
        with_field(s.label, [&] {
            s.validate();
            return 0;
        });
    }
    return studies;
}

ExecutionResult execute(const RunConfig& c) {
    if (!c.command) {
        throw Error(Stage::config, "no command given; choose one of convergence, transition, weights-dump, single-run");
    }
    ExecutionResult result;
    std::ostringstream summary;

    switch (*c.command) {
        case Command::convergence: {
            for (const StudySpec& s : resolve_studies(c)) {
                const ConvergenceReport r = run_study(s);
                if (c.formats.csv) write_file(result, c.out_dir, s.label + ".csv", report_csv(r));
                if (c.formats.markdown) write_file(result, c.out_dir, s.label + ".md", report_markdown(r));
                if (c.formats.json) write_file(result, c.out_dir, s.label + ".json", report_json(r));
                summary << s.label << ": " << scheme_name(s.scheme) << ", " << axis_name(s.axis)
                        << ", finest rate " << rate_text(r.final_rate()) << '\n';
            }
            break;
        }
        case Command::transition: {
            if (c.preset && *c.preset != "fig1") throw Error(Stage::config, "transition only accepts preset fig1");
            TransitionConfig tc = c.transition;
            tc.options = c.options;
            const TransitionResult r = run_transition_demo(tc);
            write_file(result, c.out_dir, "fig1.csv", transition_csv(r));
            std::ostringstream md;
            md << "### fig1\n\n| window | distance to " << r.high_column << " | distance to " << r.low_column << " |\n"
               << "|---|---:|---:|\n"
               << "| early | " << format_number("%.4e", r.early.to_high) << " | " << format_number("%.4e", r.early.to_low)
               << " |\n| late | " << format_number("%.4e", r.late.to_high) << " | "
               << format_number("%.4e", r.late.to_low) << " |\n";
            if (c.formats.markdown) write_file(result, c.out_dir, "fig1.md", md.str());
            summary << "fig1: early window closer to " << (r.early.to_high < r.early.to_low ? r.high_column : r.low_column)
                    << ", late window closer to " << (r.late.to_low < r.late.to_high ? r.low_column : r.high_column)
                    << '\n';
            break;
        }
        case Command::weights_dump: {
            if (!(c.weights_abar > 0.0 && c.weights_abar < 1.0)) throw Error(Stage::config, "abar: must lie in (0,1)");
            if (c.weights_n < 1) throw Error(Stage::config, "n: must be at least 1");
            const ExponentFunction f =
                c.problem ? c.problem->exponent : ExponentFunction::constant(1.0 + c.weights_abar, 1.0);
            const double T = c.problem ? c.problem->T : 1.0;
            const GQuadrature q(f.alpha0(), c.options.g_base_nodes, c.options.g_rel_tol, c.options.g_max_nodes);
            const WeightTables w = build_weight_tables(f, q, c.weights_n, T);
            std::ostringstream os;
            os << "index,w,chi,omega_corr,pi_off\n";
            for (int k = 0; k <= w.N; ++k) {
                const auto i = static_cast<std::size_t>(k);
                os << k << ',';
                if (k < w.N) os << format_number("%.17e", w.w[i]);
                os << ',';
                if (k < w.N) os << format_number("%.17e", w.chi[i]);
                os << ',' << format_number("%.17e", w.omega_corr[i]) << ',';
                if (k >= 1 && k < w.N) os << format_number("%.17e", w.pi_off[i]);
                os << '\n';
            }
            write_file(result, c.out_dir, "weights.csv", os.str());
            summary << "weights: abar = " << format_number("%g", w.abar) << ", n = " << w.N
                    << ", pi_diag = " << format_number("%.17e", w.pi_diag) << '\n';
            break;
        }
        case Command::single_run: {
            if (!c.preset && !c.problem) throw Error(Stage::config, "problem: single-run needs a preset or a problem block");
            const ProblemSpec problem = c.preset ? preset_problem(c) : *c.problem;
            const Scheme scheme = c.scheme.value_or(Scheme::alpha0_order);
            const int J = c.J.value_or(16);
            const int N = c.N.value_or(64);
            const Mesh mesh = make_mesh(problem.domain, J);
            const SolutionHistory h = run(problem, mesh, N, scheme, c.options);
            const std::string name = problem.name + "_J" + std::to_string(J) + "_N" + std::to_string(N) + ".csv";
            write_file(result, c.out_dir, name, solution_csv(mesh, h.final_solution()));
            summary << name << ": " << scheme_name(scheme) << ", final lumped norm "
                    << format_number("%.6e", FemSpace(mesh).lumped_norm(h.final_solution())) << '\n';
            break;
        }
    }
    result.summary = summary.str();
    return result;
}

}  // namespace vfdw
