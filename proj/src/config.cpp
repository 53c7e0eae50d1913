#include "vexdelay/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "vexdelay/errors.hpp"
#include "vexdelay/format.hpp"

namespace vexdelay
{

namespace
{

using Kind = ConfigError::Kind;

[[noreturn]] void range_error(const std::string& key, const std::string& message, int line = 0)
{
    throw ConfigError(Kind::range, key + ": " + message, line, 0);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(Kind::parse, key + ": expected a number, got '" + t + "'");
    return value;
}

long long to_integer(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(Kind::parse, key + ": expected an integer, got '" + t + "'");
    return value;
}

bool to_bool(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t == "true" || t == "yes" || t == "1")
        return true;
    if (t == "false" || t == "no" || t == "0")
        return false;
    throw ConfigError(Kind::parse, key + ": expected true or false, got '" + t + "'");
}

std::optional<double> to_optional(const std::string& key, const std::string& text)
{
    if (trim(text) == "auto")
        return std::nullopt;
    return to_double(key, text);
}

std::string expression_text(const std::string& key, const std::string& text)
{
    std::string t = trim(text);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
        t = t.substr(1, t.size() - 2);
    if (t.empty())
        throw ConfigError(Kind::expression, key + ": empty expression");
    try {
        Expression::parse(t);
    } catch (const ConfigError& e) {
        throw ConfigError(Kind::expression, key + ": " + e.what(), 0, e.column);
    }
    return t;
}

/// "tau:value, tau:value, ..."
TauTable to_table(const std::string& key, const std::string& text)
{
    TauTable table;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError(Kind::parse, key + ": table entries are tau:value, got '" +
                                               trim(item) + "'");
        table.emplace_back(to_double(key, item.substr(0, colon)),
                           to_double(key, item.substr(colon + 1)));
    }
    return table;
}

std::string table_text(const TauTable& table)
{
    std::string out;
    for (const auto& [tau, value] : table) {
        if (!out.empty())
            out += ", ";
        out += format_number(tau) + ":" + format_number(value);
    }
    return out;
}

std::string optional_text(const std::optional<double>& v)
{
    return v ? format_number(*v) : "auto";
}

struct KeySpec
{
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string& name, const std::string& text)> set;
    std::function<std::string(const RunConfig&)> get;
    bool required = false;
};

#define VEX_NUMBER(sec, field, req)                                                          \
    KeySpec{sec, #field,                                                                    \
            [](RunConfig& c, const std::string& n, const std::string& t) {                  \
                c.field = to_double(n, t);                                                  \
            },                                                                              \
            [](const RunConfig& c) { return format_number(c.field); }, req}
#define VEX_INTEGER(sec, field, req)                                                         \
    KeySpec{sec, #field,                                                                    \
            [](RunConfig& c, const std::string& n, const std::string& t) {                  \
                c.field = static_cast<decltype(c.field)>(to_integer(n, t));                 \
            },                                                                              \
            [](const RunConfig& c) { return std::to_string(c.field); }, req}
#define VEX_FLAG(sec, field)                                                                 \
    KeySpec{sec, #field,                                                                    \
            [](RunConfig& c, const std::string& n, const std::string& t) {                  \
                c.field = to_bool(n, t);                                                    \
            },                                                                              \
            [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }}
#define VEX_EXPR(sec, field, req)                                                            \
    KeySpec{sec, #field,                                                                    \
            [](RunConfig& c, const std::string& n, const std::string& t) {                  \
                c.field = expression_text(n, t);                                            \
            },                                                                              \
            [](const RunConfig& c) { return c.field; }, req}
#define VEX_OPTIONAL(sec, field)                                                             \
    KeySpec{sec, #field,                                                                    \
            [](RunConfig& c, const std::string& n, const std::string& t) {                  \
                c.field = to_optional(n, t);                                                \
            },                                                                              \
            [](const RunConfig& c) { return optional_text(c.field); }}

const std::vector<KeySpec>& key_table()
{
    static const std::vector<KeySpec> table = {
        VEX_INTEGER("grid", dim, false),
        VEX_NUMBER("grid", extent, false),
        VEX_INTEGER("grid", nodes, true),
        VEX_NUMBER("grid", extent_y, false),
        VEX_INTEGER("grid", nodes_y, false),

        VEX_EXPR("exponents", m, true),
        VEX_EXPR("exponents", p, true),
        VEX_NUMBER("exponents", log_holder_A, false),
        VEX_NUMBER("exponents", log_holder_delta, false),

        VEX_NUMBER("delay", mu1, true),
        VEX_EXPR("delay", mu2, false),
        KeySpec{"delay", "mu2_table",
                [](RunConfig& c, const std::string& n, const std::string& t) {
                    c.mu2_table = trim(t).empty() ? TauTable{} : to_table(n, t);
                },
                [](const RunConfig& c) { return table_text(c.mu2_table); }},
        VEX_NUMBER("delay", tau1, true),
        VEX_NUMBER("delay", tau2, true),
        VEX_INTEGER("delay", n_tau, false),
        KeySpec{"delay", "xi",
                [](RunConfig& c, const std::string& n, const std::string& t) {
                    c.xi = trim(t) == "auto" ? std::string("auto") : expression_text(n, t);
                },
                [](const RunConfig& c) { return c.xi; }},

        VEX_EXPR("initial", u0, true),
        VEX_EXPR("initial", u1, false),
        VEX_EXPR("initial", f0, false),
        VEX_NUMBER("initial", scale, false),

        VEX_NUMBER("run", t_end, true),
        VEX_OPTIONAL("run", dt),
        VEX_INTEGER("run", n_rho, false),
        VEX_NUMBER("run", threshold, false),
        VEX_FLAG("run", override_conditions),
        VEX_FLAG("run", conservative),
        VEX_FLAG("run", disable_source),
        VEX_FLAG("run", freeze_velocity),
        VEX_NUMBER("run", decay_factor, false),
        VEX_OPTIONAL("run", alpha),
        VEX_OPTIONAL("run", epsilon),
        VEX_NUMBER("run", dissipation_slack, false),

        VEX_NUMBER("output", cadence, false),
        VEX_INTEGER("output", embedding_samples, false),
        VEX_NUMBER("output", embedding_safety, false),
        KeySpec{"output", "seed",
                [](RunConfig& c, const std::string& n, const std::string& t) {
                    const long long s = to_integer(n, t);
                    if (s < 0)
                        range_error(n, "seed must be >= 0");
                    c.seed = static_cast<std::uint64_t>(s);
                },
                [](const RunConfig& c) { return std::to_string(c.seed); }},
    };
    return table;
}

#undef VEX_NUMBER
#undef VEX_INTEGER
#undef VEX_FLAG
#undef VEX_EXPR
#undef VEX_OPTIONAL

const KeySpec* find_key(const std::string& section, const std::string& key)
{
    for (const KeySpec& spec : key_table())
        if (section == spec.section && key == spec.key)
            return &spec;
    return nullptr;
}

Grid make_grid(const RunConfig& c)
{
    if (c.dim == 1)
        return Grid::line(c.extent, c.nodes);
    return Grid::rectangle(c.extent, c.extent_y, c.nodes, c.nodes_y > 0 ? c.nodes_y : c.nodes);
}

GridFunction sample_expression(const Grid& grid, const std::string& key, const std::string& text,
                               double factor = 1.0)
{
    const Expression e = Expression::parse(text);
    GridFunction u = grid.sample([&](double x, double y) { return factor * e({x, y, 0, 0}); });
    for (Index i = 0; i < u.size(); ++i)
        if (!std::isfinite(u(i)))
            throw ConfigError(Kind::expression,
                              key + ": expression '" + text + "' is not finite at node " +
                                  std::to_string(i));
    return u;
}

/// Checks that need more than one key.
void validate(const RunConfig& c)
{
    if (c.dim != 1 && c.dim != 2)
        range_error("grid.dim", "must be 1 or 2");
    if (!(c.extent > 0) || !std::isfinite(c.extent))
        range_error("grid.extent", "must be > 0");
    if (c.nodes < 3)
        range_error("grid.nodes", "must be >= 3");
    if (c.dim == 2) {
        if (!(c.extent_y > 0) || !std::isfinite(c.extent_y))
            range_error("grid.extent_y", "must be > 0");
        if (c.nodes_y != 0 && c.nodes_y < 3)
            range_error("grid.nodes_y", "must be >= 3 (or 0 to copy nodes)");
    }
    if (!(c.log_holder_A > 0))
        range_error("exponents.log_holder_A", "must be > 0");
    if (!(c.log_holder_delta > 0 && c.log_holder_delta < 1))
        range_error("exponents.log_holder_delta", "must lie in (0, 1)");
    if (!(c.mu1 >= 0) || !std::isfinite(c.mu1))
        range_error("delay.mu1", "must be >= 0");
    if (c.mu1 == 0 && !c.conservative)
        range_error("delay.mu1", "must be > 0 unless run.conservative = true");
    if (!(c.tau1 > 0))
        range_error("delay.tau1", "must be > 0");
    if (!(c.tau2 > c.tau1) || !std::isfinite(c.tau2))
        range_error("delay.tau2", "must be > delay.tau1");
    if (c.n_tau < 2)
        range_error("delay.n_tau", "must be >= 2");
    if (!(c.scale >= 0) || !std::isfinite(c.scale))
        range_error("initial.scale", "must be >= 0");
    if (!(c.t_end > 0) || !std::isfinite(c.t_end))
        range_error("run.t_end", "must be > 0");
    if (c.dt && !(*c.dt > 0))
        range_error("run.dt", "must be > 0 or auto");
    if (c.n_rho < 2)
        range_error("run.n_rho", "must be >= 2");
    if (!(c.threshold > 0))
        range_error("run.threshold", "must be > 0");
    if (!(c.decay_factor > 0 && c.decay_factor < 1))
        range_error("run.decay_factor", "must lie in (0, 1)");
    if (c.alpha && !(*c.alpha > 0 && *c.alpha < 1))
        range_error("run.alpha", "must lie in (0, 1) or be auto");
    if (c.epsilon && !(*c.epsilon >= 0))
        range_error("run.epsilon", "must be >= 0 or auto");
    if (!(c.dissipation_slack >= 0))
        range_error("run.dissipation_slack", "must be >= 0");
    if (!(c.cadence >= 0))
        range_error("output.cadence", "must be >= 0");
    if (c.embedding_samples < 1)
        range_error("output.embedding_samples", "must be >= 1");
    if (!(c.embedding_safety >= 1))
        range_error("output.embedding_safety", "must be >= 1");

    if (!c.mu2_table.empty()) {
        for (std::size_t i = 1; i < c.mu2_table.size(); ++i)
            if (!(c.mu2_table[i].first > c.mu2_table[i - 1].first))
                range_error("delay.mu2_table", "tau values must be strictly increasing");
        if (c.mu2_table.front().first > c.tau1 || c.mu2_table.back().first < c.tau2)
            range_error("delay.mu2_table", "must cover [tau1, tau2]");
        for (const auto& entry : c.mu2_table)
            if (!(entry.second >= 0))
                range_error("delay.mu2_table", "values must be >= 0");
    }

    const Grid grid = make_grid(c);
    const GridFunction m = sample_expression(grid, "exponents.m", c.m);
    const GridFunction p = sample_expression(grid, "exponents.p", c.p);
    if (m.minCoeff() < 2)
        range_error("exponents.m", "minimum " + format_number(m.minCoeff()) +
                                       " violates the bound m >= 2");
    if (p.minCoeff() < 2)
        range_error("exponents.p", "minimum " + format_number(p.minCoeff()) +
                                       " violates the bound p >= 2");
}

}  // namespace

RunConfig parse_config(const std::string& text)
{
    RunConfig config;
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        const int column = int(raw.find_first_not_of(" \t")) + 1;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(Kind::parse,
                                  "line " + std::to_string(line_no) + ": unterminated section header",
                                  line_no, column + int(line.size()));
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> sections = {"grid",    "exponents", "delay",
                                                           "initial", "run",       "output"};
            if (!sections.count(section))
                throw ConfigError(Kind::unknown_key,
                                  "line " + std::to_string(line_no) + ": unknown section [" +
                                      section + "]",
                                  line_no, column);
            continue;
        }
        const auto eq = raw.find('=');
        if (eq == std::string::npos || (hash != std::string::npos && eq > hash))
            throw ConfigError(Kind::parse,
                              "line " + std::to_string(line_no) + ": expected key = value",
                              line_no, column);
        if (section.empty())
            throw ConfigError(Kind::parse,
                              "line " + std::to_string(line_no) + ": key outside a section",
                              line_no, column);
        const std::string key = trim(raw.substr(0, eq));
        const std::string value =
            trim(raw.substr(eq + 1, hash == std::string::npos ? std::string::npos : hash - eq - 1));
        const std::string name = section + "." + key;
        const KeySpec* spec = find_key(section, key);
        if (!spec)
            throw ConfigError(Kind::unknown_key,
                              "line " + std::to_string(line_no) + ": unknown key " + name,
                              line_no, column);
        if (!seen.insert(name).second)
            throw ConfigError(Kind::parse,
                              "line " + std::to_string(line_no) + ": duplicate key " + name,
                              line_no, column);
        try {
            spec->set(config, name, value);
        } catch (const ConfigError& e) {
            const int value_column = int(eq) + 2 + int(raw.size() > eq + 1 ?
                raw.substr(eq + 1).find_first_not_of(" \t") : 0);
            throw ConfigError(e.kind, "line " + std::to_string(line_no) + ": " + e.what(),
                              line_no, e.column > 0 ? value_column + e.column - 1 : value_column);
        }
    }
    for (const KeySpec& spec : key_table()) {
        const std::string name = std::string(spec.section) + "." + spec.key;
        if (spec.required && !seen.count(name))
            throw ConfigError(Kind::missing_key, "missing required key " + name);
    }
    validate(config);
    return config;
}

std::string serialize_config(const RunConfig& config)
{
    std::string out;
    std::string section;
    for (const KeySpec& spec : key_table()) {
        if (section != spec.section) {
            if (!section.empty())
                out += '\n';
            section = spec.section;
            out += "[" + section + "]\n";
        }
        out += std::string(spec.key) + " = " + spec.get(config) + "\n";
    }
    return out;
}

void assign_key(RunConfig& config, const std::string& dotted_key, const std::string& value)
{
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos)
        throw ConfigError(Kind::unknown_key, "expected section.key, got '" + dotted_key + "'");
    const KeySpec* spec = find_key(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
    if (!spec)
        throw ConfigError(Kind::unknown_key, "unknown key " + dotted_key);
    spec->set(config, dotted_key, value);
    validate(config);
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(serialize_config(config)); }

Setup build_setup(const RunConfig& c)
{
    validate(c);
    Setup setup;
    Model& model = setup.model;
    model.grid = make_grid(c);
    const Grid& grid = model.grid;
    model.m = ExponentField(grid, sample_expression(grid, "exponents.m", c.m));
    model.p = ExponentField(grid, sample_expression(grid, "exponents.p", c.p));

    if (!c.mu2_table.empty()) {
        model.kernel = build_kernel(c.mu2_table, c.tau1, c.tau2, c.n_tau, c.mu1);
    } else {
        const Expression mu2 = Expression::parse(c.mu2);
        model.kernel = build_kernel([&](double tau) { return mu2({0, 0, 0, tau}); }, c.tau1,
                                    c.tau2, c.n_tau, c.mu1);
    }
    for (Index k = 0; k < model.kernel.size(); ++k)
        if (!std::isfinite(model.kernel.mu2(k)) || model.kernel.mu2(k) < 0)
            throw ConfigError(Kind::range, "delay.mu2: values must be finite and >= 0");

    setup.mass_condition = check_mass_condition(model.kernel);
    if (c.conservative) {
        model.xi = Vector::Zero(grid.size());
        setup.xi_defaulted = true;
    } else if (c.xi == "auto") {
        if (setup.mass_condition) {
            model.xi = xi_default(model.kernel, model.m).values;
        } else {
            model.xi = Vector::Zero(grid.size());
            setup.xi_defaulted = true;
        }
    } else {
        model.xi = sample_expression(grid, "delay.xi", c.xi);
        if (!(model.xi.minCoeff() > 0))
            throw ConfigError(Kind::range, "delay.xi: values must be > 0");
    }
    setup.xi_condition = !setup.xi_defaulted && setup.mass_condition &&
                         check_xi_condition(model.kernel, XiField(model.xi), model.m);

    const Expression f0 = Expression::parse(c.f0);
    const double scale = c.scale;
    model.history = [f0, scale](double x, double y, double s) { return scale * f0({x, y, s, 0}); };
    model.n_rho = c.n_rho;
    model.source = !c.disable_source;
    model.freeze_velocity = c.freeze_velocity;
    model.dt = c.dt ? *c.dt : model.cfl_limit();
    if (model.dt > model.cfl_limit() * (1 + 1e-12))
        throw ConfigError(Kind::range, "run.dt: " + format_number(model.dt) +
                                           " exceeds the CFL limit " +
                                           format_number(model.cfl_limit()));

    setup.u0 = sample_expression(grid, "initial.u0", c.u0, c.scale);
    setup.u1 = sample_expression(grid, "initial.u1", c.u1, c.scale);
    return setup;
}

}  // namespace vexdelay
