#include "neno/vm/values.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <regex>

#include <boost/multiprecision/cpp_int.hpp>

#include "neno/rdf/vocab.hpp"

namespace neno::vm {

namespace {

using boost::multiprecision::cpp_int;
using rdf::Term;

const std::string kAny = vocab::rdfs("Resource");

std::string_view xsd_local(std::string_view dt) {
    if (dt.substr(0, vocab::kXsd.size()) != vocab::kXsd)
        return {};
    return dt.substr(vocab::kXsd.size());
}

struct IntRange {
    std::string_view name;
    std::optional<cpp_int> lo, hi;
};

const std::vector<IntRange>& int_ranges() {
    static const std::vector<IntRange> ranges = [] {
        auto p2 = [](unsigned n) { return cpp_int(1) << n; };
        return std::vector<IntRange>{
            {"integer", {}, {}},
            {"long", -p2(63), p2(63) - 1},
            {"int", -p2(31), p2(31) - 1},
            {"short", -p2(15), p2(15) - 1},
            {"byte", -p2(7), p2(7) - 1},
            {"nonNegativeInteger", cpp_int(0), {}},
            {"positiveInteger", cpp_int(1), {}},
            {"nonPositiveInteger", {}, cpp_int(0)},
            {"negativeInteger", {}, cpp_int(-1)},
            {"unsignedLong", cpp_int(0), p2(64) - 1},
            {"unsignedInt", cpp_int(0), p2(32) - 1},
            {"unsignedShort", cpp_int(0), p2(16) - 1},
            {"unsignedByte", cpp_int(0), p2(8) - 1},
        };
    }();
    return ranges;
}

const IntRange* int_range(std::string_view dt) {
    auto local = xsd_local(dt);
    for (const auto& r : int_ranges())
        if (r.name == local)
            return &r;
    return nullptr;
}

enum class NumKind { None, Integer, Decimal, Float, Double };

NumKind num_kind(std::string_view dt) {
    if (int_range(dt))
        return NumKind::Integer;
    auto local = xsd_local(dt);
    if (local == "decimal")
        return NumKind::Decimal;
    if (local == "float")
        return NumKind::Float;
    if (local == "double")
        return NumKind::Double;
    return NumKind::None;
}

Category term_category(const Term& t) {
    return t.is_uri() ? Category::Object : category_of(t.datatype());
}

cpp_int parse_int(const Term& t) {
    static const std::regex re("[+-]?[0-9]+");
    if (!std::regex_match(t.value(), re))
        throw ValueError("invalid integer literal \"" + t.value() + "\"");
    std::string digits = t.value();
    if (digits[0] == '+')
        digits.erase(0, 1);
    return cpp_int(digits);
}

double parse_double(const Term& t) {
    std::string_view s = t.value();
    if (s == "INF" || s == "+INF")
        return std::numeric_limits<double>::infinity();
    if (s == "-INF")
        return -std::numeric_limits<double>::infinity();
    if (s == "NaN")
        return std::numeric_limits<double>::quiet_NaN();
    if (!s.empty() && s[0] == '+')
        s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || s.find_first_of("xXpP") != s.npos)
        throw ValueError("invalid numeric literal \"" + t.value() + "\"");
    return v;
}

double to_double(const Term& t) {
    if (num_kind(t.datatype()) == NumKind::Integer)
        return parse_int(t).convert_to<double>();
    return parse_double(t);
}

Term make_int(const cpp_int& v, const std::string& dt) {
    const IntRange* r = int_range(dt);
    if (r && ((r->lo && v < *r->lo) || (r->hi && v > *r->hi)))
        throw ValueError("value " + v.str() + " out of range for xsd:" + std::string(r->name));
    return Term::literal(v.str(), dt);
}

std::string format_double(double v, NumKind kind) {
    if (std::isnan(v))
        return "NaN";
    if (std::isinf(v))
        return v > 0 ? "INF" : "-INF";
    std::array<char, 64> buf{};
    std::to_chars_result res;
    if (kind == NumKind::Float)
        res = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(v));
    else if (kind == NumKind::Decimal)
        res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
    else
        res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), res.ptr);
    if (s.find_first_of(".e") == std::string::npos)
        s += ".0";
    return s;
}

Term make_real(double v, const std::string& dt) {
    return Term::literal(format_double(v, num_kind(dt)), dt);
}

// Days since 1970-01-01 for a proleptic Gregorian date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, long long& y, unsigned& m, unsigned& d) {
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

struct Moment {
    long long days = 0;
    std::string time;  // "hh:mm:ss[.frac]" for dateTime
    std::string zone;
    long double seconds = 0;  // absolute, zone-adjusted
};

Moment parse_moment(const Term& t, bool with_time) {
    static const std::regex date_re(R"((\d{4,})-(\d{2})-(\d{2})(Z|[+-]\d{2}:\d{2})?)");
    static const std::regex dt_re(
        R"((\d{4,})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2}(?:\.\d+)?)(Z|[+-]\d{2}:\d{2})?)");
    std::smatch m;
    const std::string& s = t.value();
    if (!std::regex_match(s, m, with_time ? dt_re : date_re))
        throw ValueError("invalid " + std::string(with_time ? "dateTime" : "date") + " literal \"" + s + "\"");
    Moment out;
    unsigned month = static_cast<unsigned>(std::stoi(m[2])), day = static_cast<unsigned>(std::stoi(m[3]));
    if (month < 1 || month > 12 || day < 1 || day > 31)
        throw ValueError("invalid date \"" + s + "\"");
    out.days = days_from_civil(std::stoll(m[1]), month, day);
    out.seconds = static_cast<long double>(out.days) * 86400;
    std::string zone;
    if (with_time) {
        out.time = s.substr(static_cast<std::size_t>(m.position(4)),
                            static_cast<std::size_t>(m.position(6) + m.length(6) - m.position(4)));
        out.seconds += std::stoi(m[4]) * 3600 + std::stoi(m[5]) * 60 + std::stold(m[6]);
        zone = m[7];
    } else {
        zone = m[4];
    }
    out.zone = zone;
    if (!zone.empty() && zone != "Z") {
        int offset = std::stoi(zone.substr(1, 2)) * 3600 + std::stoi(zone.substr(4, 2)) * 60;
        out.seconds -= zone[0] == '+' ? offset : -offset;
    }
    return out;
}

std::string format_date(long long days) {
    long long y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", y, m, d);
    return buf;
}

Term shift_days(const Term& t, long long delta) {
    bool with_time = category_of(t.datatype()) == Category::DateTime;
    Moment mo = parse_moment(t, with_time);
    std::string out = format_date(mo.days + delta);
    if (with_time)
        out += "T" + mo.time;
    return Term::literal(out + mo.zone, t.datatype());
}

const char* op_symbol(Op op) {
    switch (op) {
    case Op::Add: return "+";
    case Op::Subtract: return "-";
    case Op::Multiply: return "*";
    case Op::Divide: return "/";
    case Op::Not: return "!";
    case Op::Equals: return "==";
    case Op::Compare: return "<";
    }
    return "?";
}

} // namespace

Category category_of(std::string_view dt) {
    if (dt.empty() || dt == kAny)
        return Category::Other;
    if (num_kind(dt) != NumKind::None)
        return Category::Numeric;
    auto local = xsd_local(dt);
    if (local == "string")
        return Category::String;
    if (local == "boolean")
        return Category::Boolean;
    if (local == "date")
        return Category::Date;
    if (local == "dateTime")
        return Category::DateTime;
    if (local == "anyURI")
        return Category::AnyUri;
    if (!local.empty())
        return Category::Other;
    return Category::Object;
}

bool is_integer_type(std::string_view dt) { return int_range(dt) != nullptr; }
bool is_numeric_type(std::string_view dt) { return num_kind(dt) != NumKind::None; }

bool is_known_datatype(std::string_view dt) {
    auto c = category_of(dt);
    return c != Category::Other && c != Category::Object;
}

std::string promote(std::string_view a, std::string_view b) {
    NumKind ka = num_kind(a), kb = num_kind(b);
    NumKind k = std::max(ka, kb);
    switch (k) {
    case NumKind::Double: return vocab::xsd("double");
    case NumKind::Float: return vocab::xsd("float");
    case NumKind::Decimal: return vocab::xsd("decimal");
    default: return a == b ? std::string(a) : vocab::xsd("integer");
    }
}

OpCheck check_operation(Op op, std::string_view left, std::string_view right) {
    using V = OpCheck::Verdict;
    const std::string boolean = vocab::xsd("boolean");
    Category l = category_of(left), r = category_of(right);
    bool any_l = left.empty() || left == kAny, any_r = right.empty() || right == kAny;

    if (op == Op::Not) {
        if (l == Category::Boolean || any_l)
            return {V::Ok, boolean};
        return {V::Unsupported, {}};
    }
    if (op == Op::Equals) {
        auto literal = [](Category c) { return c != Category::Object && c != Category::Other && c != Category::AnyUri; };
        if (literal(l) && literal(r) && l != r)
            return {V::Mismatch, {}};
        return {V::Ok, boolean};
    }
    if (any_l || any_r) {
        if (op == Op::Compare)
            return {V::Ok, boolean};
        return {V::Ok, std::string(any_l ? right : left)};
    }
    if (op == Op::Compare) {
        if (l != r)
            return {V::Mismatch, {}};
        if (l == Category::Numeric || l == Category::String || l == Category::Date || l == Category::DateTime ||
            l == Category::AnyUri)
            return {V::Ok, boolean};
        return {V::Unsupported, {}};
    }
    if ((op == Op::Add || op == Op::Subtract) && (l == Category::Date || l == Category::DateTime)) {
        if (is_integer_type(right))
            return {V::Ok, std::string(left)};
        return {l == r ? V::Unsupported : V::Mismatch, {}};
    }
    if (l != r)
        return {V::Mismatch, {}};
    if (l == Category::Numeric)
        return {V::Ok, promote(left, right)};
    if (l == Category::String && op == Op::Add)
        return {V::Ok, std::string(left)};
    return {V::Unsupported, {}};
}

Term canonical(const Term& t) {
    if (t.is_uri())
        return t;
    switch (num_kind(t.datatype())) {
    case NumKind::Integer: return make_int(parse_int(t), t.datatype());
    case NumKind::Decimal:
    case NumKind::Float:
    case NumKind::Double: return make_real(parse_double(t), t.datatype());
    case NumKind::None: break;
    }
    if (category_of(t.datatype()) == Category::Boolean) {
        if (t.value() == "true" || t.value() == "1")
            return vocab::boolean(true);
        if (t.value() == "false" || t.value() == "0")
            return vocab::boolean(false);
        throw ValueError("invalid boolean literal \"" + t.value() + "\"");
    }
    return t;
}

Term arithmetic(Op op, const Term& left, const Term& right) {
    Category l = term_category(left), r = term_category(right);
    std::string what = std::string("'") + op_symbol(op) + "'";
    if ((op == Op::Add || op == Op::Subtract) && (l == Category::Date || l == Category::DateTime) &&
        !right.is_uri() && is_integer_type(right.datatype())) {
        cpp_int n = parse_int(right);
        if (n > 1000000000 || n < -1000000000)
            throw ValueError("date offset out of range");
        long long delta = n.convert_to<long long>();
        return shift_days(left, op == Op::Add ? delta : -delta);
    }
    if (l == Category::String && r == Category::String && op == Op::Add)
        return Term::string(left.value() + right.value());
    if (l != Category::Numeric || r != Category::Numeric)
        throw ValueError("unsupported operation " + what + " on " + left.to_ntriples() + " and " +
                         right.to_ntriples());
    std::string dt = promote(left.datatype(), right.datatype());
    if (num_kind(dt) == NumKind::Integer) {
        cpp_int a = parse_int(left), b = parse_int(right);
        switch (op) {
        case Op::Add: return make_int(a + b, dt);
        case Op::Subtract: return make_int(a - b, dt);
        case Op::Multiply: return make_int(a * b, dt);
        case Op::Divide:
            if (b == 0)
                throw ValueError("division by zero");
            return make_int(a / b, dt);
        default: break;
        }
    } else {
        double a = to_double(left), b = to_double(right);
        switch (op) {
        case Op::Add: return make_real(a + b, dt);
        case Op::Subtract: return make_real(a - b, dt);
        case Op::Multiply: return make_real(a * b, dt);
        case Op::Divide:
            if (b == 0)
                throw ValueError("division by zero");
            return make_real(a / b, dt);
        default: break;
        }
    }
    throw ValueError("unsupported operation " + what);
}

Term logical_not(const Term& t) {
    if (term_category(t) != Category::Boolean)
        throw ValueError("'!' applied to non-boolean " + t.to_ntriples());
    return vocab::boolean(canonical(t).value() != "true");
}

bool equals(const Term& a, const Term& b) {
    Category ca = term_category(a), cb = term_category(b);
    if (ca == cb && (ca == Category::Numeric || ca == Category::Date || ca == Category::DateTime)) {
        try {
            return compare(a, b) == 0;
        } catch (const ValueError&) {
            return false;
        }
    }
    if (ca == Category::Boolean && cb == Category::Boolean)
        return canonical(a) == canonical(b);
    return a == b;
}

int compare(const Term& a, const Term& b) {
    Category ca = term_category(a), cb = term_category(b);
    auto sign = [](auto x, auto y) { return x < y ? -1 : (y < x ? 1 : 0); };
    if (ca == Category::Numeric && cb == Category::Numeric) {
        if (num_kind(a.datatype()) == NumKind::Integer && num_kind(b.datatype()) == NumKind::Integer)
            return sign(parse_int(a), parse_int(b));
        double x = to_double(a), y = to_double(b);
        if (std::isnan(x) || std::isnan(y))
            throw ValueError("NaN is not comparable");
        return sign(x, y);
    }
    bool uri_like_a = ca == Category::Object || ca == Category::AnyUri;
    bool uri_like_b = cb == Category::Object || cb == Category::AnyUri;
    if (uri_like_a && uri_like_b)
        return sign(a.value(), b.value());
    if (ca != cb)
        throw ValueError("cannot compare " + a.to_ntriples() + " with " + b.to_ntriples());
    switch (ca) {
    case Category::String: return sign(a.value(), b.value());
    case Category::Date:
    case Category::DateTime: {
        bool with_time = ca == Category::DateTime;
        auto x = parse_moment(a, with_time), y = parse_moment(b, with_time);
        return with_time ? sign(x.seconds, y.seconds) : sign(x.days, y.days);
    }
    default:
        throw ValueError("values of type <" + a.datatype() + "> are not ordered");
    }
}

long long to_index(const Term& t) {
    if (t.is_uri() || !is_integer_type(t.datatype()))
        throw ValueError("index must be an integer, got " + t.to_ntriples());
    cpp_int v = parse_int(t);
    if (v < 0 || v > std::numeric_limits<long long>::max())
        throw ValueError("index " + v.str() + " out of range");
    return v.convert_to<long long>();
}

} // namespace neno::vm
