#include "lpdyn/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "lpdyn/entropy.hpp"
#include "lpdyn/errors.hpp"
#include "lpdyn/special.hpp"

namespace lpdyn {

namespace {

bool needs_quotes(const std::string& text) {
    for (const char c : text) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
    }
    return false;
}

// Significant digits in a formatted decimal: everything from the first
// nonzero digit on, the decimal point excluded.
int count_significant(const std::string& s) {
    int count = 0;
    bool started = false;
    for (const char c : s) {
        if (c < '0' || c > '9') continue;
        if (!started && c == '0') continue;
        started = true;
        ++count;
    }
    return count;
}

int parse_positive_int(const std::string& text, const std::string& name) {
    if (text.empty()) throw Error("closed-form '" + name + "' needs an integer argument");
    size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(text, &pos);
    } catch (const std::exception&) {
        throw Error("closed-form '" + name + "' argument '" + text +
                    "' is not an integer");
    }
    if (pos != text.size() || value < 1) {
        throw Error("closed-form '" + name + "' argument '" + text +
                    "' is not a positive integer");
    }
    return value;
}

const char* kClosedFormList =
    "smyth, mx4:r, mx5:r, cstar:M, rank2-entropy:r, markoff-x5, somos-x6";

} // namespace

std::string csv_field(const std::string& text) {
    if (!needs_quotes(text)) return text;
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_field(fields[i]);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string format_significant(double v, int digits) {
    if (digits < 1) throw Error("significant-digit count must be at least 1");
    if (!std::isfinite(v)) return "nan";
    if (v == 0.0) {
        std::string out = "0";
        if (digits > 1) out += "." + std::string(static_cast<size_t>(digits - 1), '0');
        return out;
    }
    const int e = static_cast<int>(std::floor(std::log10(std::fabs(v))));
    int decimals = digits - 1 - e;
    if (decimals < 0) decimals = 0;
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    // Rounding can push the value into the next decade and add a digit;
    // one fewer decimal restores the requested count.
    if (count_significant(buf) > digits && decimals > 0) {
        std::snprintf(buf, sizeof(buf), "%.*f", decimals - 1, v);
    }
    return buf;
}

std::string canonical_system_name(const std::string& name) {
    const std::string prefix = "rank2:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string arg = name.substr(prefix.size());
        if (!arg.empty() && arg.find_first_not_of("0123456789") == std::string::npos) {
            return "rank2(" + arg + ")";
        }
    }
    return name;
}

Rat parse_rational_text(const std::string& text) {
    if (text.empty()) throw Error("empty rational value");
    try {
        Rat q(text);
        if (q.get_den() == 0) throw Error("zero denominator in '" + text + "'");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw Error("cannot parse '" + text + "' as a rational (expected p or p/q)");
    }
}

std::vector<std::string> closed_form_names() {
    return {"smyth",          "mx4:r",      "mx5:r",   "cstar:M",
            "rank2-entropy:r", "markoff-x5", "somos-x6"};
}

double closed_form_value(const std::string& name) {
    std::string base = name;
    std::string arg;
    const size_t colon = name.find(':');
    if (colon != std::string::npos) {
        base = name.substr(0, colon);
        arg = name.substr(colon + 1);
    }
    const bool has_arg = colon != std::string::npos;

    if (base == "smyth" || base == "markoff-x5" || base == "somos-x6") {
        if (has_arg) {
            throw Error("closed-form '" + base + "' takes no argument; valid names: " +
                        kClosedFormList);
        }
        if (base == "smyth") return smyth_constant();
        if (base == "markoff-x5") return markoff_x5_closed();
        return somos_x6_closed();
    }
    if (base == "mx4" || base == "mx5" || base == "cstar" || base == "rank2-entropy") {
        const int v = parse_positive_int(arg, base);
        if (base == "mx4") return mx4_closed(v);
        if (base == "mx5") return mx5_closed(v);
        if (base == "cstar") return cstar_constant(v);
        return rank2_entropy_exact(v);
    }
    throw Error("unknown closed-form name '" + name + "'; valid names: " + kClosedFormList);
}

} // namespace lpdyn
