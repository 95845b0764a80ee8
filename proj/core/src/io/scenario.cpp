#include "ocq/io/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "ocq/error.hpp"
#include "ocq/io/digest.hpp"

namespace ocq::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_factor(std::string_view f, std::string_view whole) {
    f = trim(f);
    if (f == "pi") return std::numbers::pi;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || end != f.data() + f.size()) {
        throw UsageError("cannot parse '" + std::string(whole) + "' as a real number");
    }
    return v;
}

std::uint64_t parse_unsigned(std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
        throw UsageError("cannot parse '" + std::string(text) + "' as a non-negative integer");
    }
    return v;
}

std::vector<std::size_t> parse_sweep(std::string_view text) {
    std::vector<std::size_t> out;
    const auto dots = text.find("..");
    if (dots != std::string_view::npos) {
        const auto lo = parse_unsigned(text.substr(0, dots));
        const auto hi = parse_unsigned(text.substr(dots + 2));
        if (hi < lo) throw UsageError("range '" + std::string(text) + "' is empty");
        for (auto n = lo; n <= hi; ++n) out.push_back(static_cast<std::size_t>(n));
        return out;
    }
    for (auto part : split(text, ',')) out.push_back(static_cast<std::size_t>(parse_unsigned(part)));
    return out;
}

}  // namespace

double parse_real_expression(std::string_view text) {
    text = trim(text);
    // a leading sign applies to the whole product
    double sign = 1.0;
    std::string_view body = text;
    if (!body.empty() && (body.front() == '-' || body.front() == '+') && body.substr(1).starts_with("pi")) {
        sign = body.front() == '-' ? -1.0 : 1.0;
        body.remove_prefix(1);
    }
    double value = 1.0;
    char op = '*';
    std::size_t start = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        const bool at_end = i == body.size();
        // '*' and '/' separate factors; exponent markers like 1e-3 are left intact
        if (at_end || body[i] == '*' || body[i] == '/') {
            const double f = parse_factor(body.substr(start, i - start), text);
            if (op == '*') {
                value *= f;
            } else {
                if (f == 0.0) throw UsageError("division by zero in '" + std::string(text) + "'");
                value /= f;
            }
            if (!at_end) op = body[i];
            start = i + 1;
        }
    }
    return sign * value;
}

void Scenario::resolve_defaults() {
    if (modes == 0) modes = width > 0.0 ? 1024 : 4096;
    if (t_max == 0.0) t_max = 4.0 * std::numbers::pi;
    if (dt == 0.0) dt = std::numbers::pi / 256.0;
    if (phases.empty()) phases = {0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi};
}

void Scenario::validate() const {
    auto fail = [](std::string_view field, std::string_view reason) {
        throw UsageError("scenario field '" + std::string(field) + "': " + std::string(reason));
    };
    for (auto [name, v] : {std::pair{"kappa", kappa}, {"position", position}, {"width", width},
                           {"temperature", temperature}, {"t_max", t_max}, {"dt", dt}, {"omega_t", omega_t},
                           {"window_width", window.width}}) {
        if (!std::isfinite(v)) fail(name, "must be finite");
    }
    if (particles == 0) fail("particles", "must be at least 1");
    if (width < 0.0) fail("width", "must be non-negative");
    if (temperature < 0.0) fail("temperature", "must be non-negative");
    if (modes < 8 * particles) fail("modes", "must be at least 8 x particles");
    if (modes < particles + 16) fail("modes", "must leave at least 16 unoccupied modes");
    if (!(dt > 0.0)) fail("dt", "must be positive");
    if (!(t_max > 0.0)) fail("t_max", "must be positive");
    try {
        (void)TimeGrid::covering(t_max, dt);
    } catch (const UsageError&) {
        fail("dt", "must divide t_max");
    }
    if (window.width < 0.0 || window.width > t_max / 3.0) fail("window_width", "must lie in [0, t_max/3]");
    if (phases.empty()) fail("phases", "must not be empty");
    for (double p : phases) {
        if (!std::isfinite(p)) fail("phases", "must be finite");
    }
    if (shots == 0) fail("shots", "must be positive");
    for (std::size_t n : sweep) {
        if (n == 0) fail("sweep", "particle numbers must be positive");
        if (modes < 8 * n || modes < n + 16) fail("sweep", "entry too large for the mode count");
    }
}

std::string Scenario::canonical() const {
    std::ostringstream out;
    out << "particles=" << particles << '\n'
        << "kappa=" << format_double(kappa) << '\n'
        << "position=" << format_double(position) << '\n'
        << "width=" << format_double(width) << '\n'
        << "temperature=" << format_double(temperature) << '\n'
        << "modes=" << modes << '\n'
        << "t_max=" << format_double(t_max) << '\n'
        << "dt=" << format_double(dt) << '\n'
        << "omega_t=" << format_double(omega_t) << '\n'
        << "window=" << to_string(window.shape) << '\n'
        << "window_width=" << format_double(window.width) << '\n'
        << "phases=";
    for (std::size_t i = 0; i < phases.size(); ++i) out << (i ? "," : "") << format_double(phases[i]);
    out << '\n' << "shots=" << shots << '\n' << "seed=" << seed << '\n' << "sweep=";
    for (std::size_t i = 0; i < sweep.size(); ++i) out << (i ? "," : "") << sweep[i];
    out << '\n';
    return out.str();
}

std::string Scenario::hash() const { return sha256_hex(canonical()); }

Scenario parse_scenario(std::string_view text, std::string_view origin) {
    Scenario sc;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no); };
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw UsageError(where() + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (value.empty()) throw UsageError(where() + ": field '" + key + "' has no value");
        if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
            throw UsageError(where() + ": field '" + key + "' repeats line " + std::to_string(it->second));
        }
        try {
            if (key == "particles") sc.particles = static_cast<std::size_t>(parse_unsigned(value));
            else if (key == "kappa") sc.kappa = parse_real_expression(value);
            else if (key == "position") sc.position = parse_real_expression(value);
            else if (key == "width") sc.width = parse_real_expression(value);
            else if (key == "temperature") sc.temperature = parse_real_expression(value);
            else if (key == "modes") sc.modes = static_cast<std::size_t>(parse_unsigned(value));
            else if (key == "t_max") sc.t_max = parse_real_expression(value);
            else if (key == "dt") sc.dt = parse_real_expression(value);
            else if (key == "omega_t") sc.omega_t = parse_real_expression(value);
            else if (key == "window") {
                if (value == "gaussian") sc.window.shape = WindowShape::gaussian;
                else if (value == "rectangular") sc.window.shape = WindowShape::rectangular;
                else throw UsageError("expected 'gaussian' or 'rectangular'");
            } else if (key == "window_width") sc.window.width = parse_real_expression(value);
            else if (key == "phases") {
                sc.phases.clear();
                for (auto part : split(value, ',')) sc.phases.push_back(parse_real_expression(part));
            } else if (key == "shots") sc.shots = parse_unsigned(value);
            else if (key == "seed") sc.seed = parse_unsigned(value);
            else if (key == "sweep") sc.sweep = parse_sweep(value);
            else throw UsageError("unknown field");
        } catch (const UsageError& e) {
            throw UsageError(where() + ": field '" + key + "': " + e.what());
        }
    }
    sc.resolve_defaults();
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

}  // namespace ocq::io
