#include "gmpforge/sut.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <unordered_map>

#include "gmpforge/error.hpp"

namespace gmpforge {

namespace {

// ---- shared graph shapes -------------------------------------------------

// Straight line with one self-loop: init, repeated check, return.
CfgGraph line_loop_graph() {
    return build_cfg({0, 1, 2}, {{0, 1}, {1, 1}, {1, 2}}, 0, {2});
}

// Two-way branch joining at the return node.
CfgGraph diamond_graph() {
    return build_cfg({0, 1, 2, 3}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, 0, {3});
}

// if / else-if / else joining at the return node.
CfgGraph three_way_graph() {
    return build_cfg({0, 1, 2, 3, 4, 5},
                     {{0, 1}, {0, 2}, {1, 5}, {2, 3}, {2, 4}, {3, 5}, {4, 5}}, 0,
                     {5});
}

// Scan loop with two distinct exits (hit / exhausted).
CfgGraph scan_graph() {
    return build_cfg({0, 1, 2, 3}, {{0, 1}, {1, 1}, {1, 2}, {1, 3}}, 0, {2, 3});
}

// Validity check that may skip the loop entirely.
CfgGraph guarded_loop_graph() {
    return build_cfg({0, 1, 2}, {{0, 1}, {0, 2}, {1, 1}, {1, 2}}, 0, {2});
}

// Guarded scan loop with two exits; the guard can bail straight to one exit.
CfgGraph guarded_scan_graph() {
    return build_cfg({0, 1, 2, 3}, {{0, 1}, {0, 3}, {1, 1}, {1, 2}, {1, 3}}, 0,
                     {2, 3});
}

// Sign normalisation: error exit, two independent fix-up branches.
CfgGraph sign_fixup_graph() {
    return build_cfg({0, 1, 2, 3, 4, 5, 6},
                     {{0, 1},
                      {0, 6},
                      {1, 2},
                      {1, 3},
                      {2, 3},
                      {3, 4},
                      {3, 5},
                      {4, 5}},
                     0, {5, 6});
}

// Trial-division loop: check node and probe node alternate.
CfgGraph trial_division_graph() {
    return build_cfg({0, 1, 2, 3, 4}, {{0, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 4}},
                     0, {3, 4});
}

// Counting loop with an explicit body node and a single exit.
CfgGraph counted_body_graph() {
    return build_cfg({0, 1, 2, 3}, {{0, 1}, {1, 2}, {1, 3}, {2, 1}}, 0, {3});
}

// ---- component bodies ----------------------------------------------------

bool is_vowel(char c) {
    switch (c) {
        case 'a':
        case 'e':
        case 'i':
        case 'o':
        case 'u':
            return true;
        default:
            return false;
    }
}

std::optional<RuntimeValue> palindrome_iterative(std::span<const RuntimeValue> in,
                                                 Tracer& t) {
    const std::string& s = in[0].as_text();
    t.visit(0);
    std::size_t i = 0;
    std::size_t j = s.empty() ? 0 : s.size() - 1;
    while (true) {
        t.visit(1);
        if (i >= j) break;
        if (s[i] != s[j]) break;
        ++i;
        --j;
    }
    t.visit(2);
    return RuntimeValue::boolean(i >= j);
}

bool palindrome_helper(const std::string& s, std::size_t i, std::size_t j,
                       Tracer& t) {
    Tracer::DepthGuard guard(t);
    t.visit(1);
    if (i >= j) return true;
    if (s[i] != s[j]) return false;
    return palindrome_helper(s, i + 1, j - 1, t);
}

std::optional<RuntimeValue> palindrome_recursive(std::span<const RuntimeValue> in,
                                                 Tracer& t) {
    const std::string& s = in[0].as_text();
    t.visit(0);
    bool r = palindrome_helper(s, 0, s.empty() ? 0 : s.size() - 1, t);
    t.visit(2);
    return RuntimeValue::boolean(r);
}

std::optional<RuntimeValue> fibonacci_iterative(std::span<const RuntimeValue> in,
                                                Tracer& t) {
    std::int64_t n = in[0].as_number();
    t.visit(0);
    std::int64_t a = 0;
    std::int64_t b = 1;
    std::int64_t i = 0;
    while (true) {
        t.visit(1);
        if (i >= n) break;
        std::int64_t next = a + b;
        a = b;
        b = next;
        ++i;
    }
    t.visit(2);
    return RuntimeValue::number(a);
}

std::int64_t fibonacci_helper(std::int64_t n, Tracer& t) {
    Tracer::DepthGuard guard(t);
    t.visit(1);
    if (n <= 0) return 0;
    if (n == 1) return 1;
    return fibonacci_helper(n - 1, t) + fibonacci_helper(n - 2, t);
}

std::optional<RuntimeValue> fibonacci_recursive(std::span<const RuntimeValue> in,
                                                Tracer& t) {
    std::int64_t n = in[0].as_number();
    t.visit(0);
    std::int64_t r = fibonacci_helper(n, t);
    t.visit(2);
    return RuntimeValue::number(r);
}

std::optional<RuntimeValue> euclidean_iterative(std::span<const RuntimeValue> in,
                                                Tracer& t) {
    std::int64_t a = std::llabs(in[0].as_number());
    std::int64_t b = std::llabs(in[1].as_number());
    t.visit(0);
    while (true) {
        t.visit(1);
        if (b == 0) break;
        std::int64_t r = a % b;
        a = b;
        b = r;
    }
    t.visit(2);
    return RuntimeValue::number(a);
}

std::int64_t euclid_helper(std::int64_t a, std::int64_t b, Tracer& t) {
    Tracer::DepthGuard guard(t);
    t.visit(1);
    if (b == 0) return a;
    return euclid_helper(b, a % b, t);
}

std::optional<RuntimeValue> euclidean_recursive(std::span<const RuntimeValue> in,
                                                Tracer& t) {
    std::int64_t a = std::llabs(in[0].as_number());
    std::int64_t b = std::llabs(in[1].as_number());
    t.visit(0);
    std::int64_t r = euclid_helper(a, b, t);
    t.visit(2);
    return RuntimeValue::number(r);
}

// Inputs are 16.16 fixed point; iterates z = z^2 + c up to 16 times and
// returns the iteration count reached before escape.
std::optional<RuntimeValue> mandelbrot(std::span<const RuntimeValue> in,
                                       Tracer& t) {
    constexpr std::int64_t scale = 1 << 16;
    std::int64_t cx = in[0].as_number();
    std::int64_t cy = in[1].as_number();
    std::int64_t zx = cx;
    std::int64_t zy = cy;
    t.visit(0);
    std::int64_t it = 0;
    while (true) {
        t.visit(1);
        if (it >= 16) break;
        std::int64_t zx2 = (zx * zx) / scale;
        std::int64_t zy2 = (zy * zy) / scale;
        if (zx2 + zy2 > 4 * scale) break;
        std::int64_t nx = zx2 - zy2 + cx;
        std::int64_t ny = 2 * ((zx * zy) / scale) + cy;
        zx = nx;
        zy = ny;
        ++it;
    }
    t.visit(2);
    return RuntimeValue::number(it);
}

std::optional<RuntimeValue> always_true(std::span<const RuntimeValue> in,
                                        Tracer& t) {
    t.visit(0);
    bool r;
    if (in[0].as_boolean()) {
        t.visit(1);
        r = true;
    } else {
        t.visit(2);
        r = true;
    }
    t.visit(3);
    return RuntimeValue::boolean(r);
}

std::optional<RuntimeValue> true_or_false(std::span<const RuntimeValue> in,
                                          Tracer& t) {
    t.visit(0);
    bool r;
    if (in[0].as_boolean()) {
        t.visit(1);
        r = true;
    } else {
        t.visit(2);
        r = false;
    }
    t.visit(3);
    return RuntimeValue::boolean(r);
}

std::optional<RuntimeValue> boolean_and(std::span<const RuntimeValue> in,
                                        Tracer& t) {
    t.visit(0);
    bool r;
    if (in[0].as_boolean()) {
        t.visit(1);
        r = in[1].as_boolean();
    } else {
        t.visit(2);
        r = false;
    }
    t.visit(3);
    return RuntimeValue::boolean(r);
}

std::optional<RuntimeValue> boolean_or(std::span<const RuntimeValue> in,
                                       Tracer& t) {
    t.visit(0);
    bool r;
    if (in[0].as_boolean()) {
        t.visit(1);
        r = true;
    } else {
        t.visit(2);
        r = in[1].as_boolean();
    }
    t.visit(3);
    return RuntimeValue::boolean(r);
}

// True when the inputs agree: both set, or neither.
std::optional<RuntimeValue> and_or(std::span<const RuntimeValue> in, Tracer& t) {
    bool a = in[0].as_boolean();
    bool b = in[1].as_boolean();
    t.visit(0);
    bool r;
    if (a && b) {
        t.visit(1);
        r = true;
    } else {
        t.visit(2);
        if (a || b) {
            t.visit(3);
            r = false;
        } else {
            t.visit(4);
            r = true;
        }
    }
    t.visit(5);
    return RuntimeValue::boolean(r);
}

std::optional<RuntimeValue> boolean_xor(std::span<const RuntimeValue> in,
                                        Tracer& t) {
    bool a = in[0].as_boolean();
    bool b = in[1].as_boolean();
    t.visit(0);
    bool r;
    if (a && b) {
        t.visit(1);
        r = false;
    } else {
        t.visit(2);
        if (a || b) {
            t.visit(3);
            r = true;
        } else {
            t.visit(4);
            r = false;
        }
    }
    t.visit(5);
    return RuntimeValue::boolean(r);
}

std::optional<RuntimeValue> substring(std::span<const RuntimeValue> in,
                                      Tracer& t) {
    const std::string& hay = in[0].as_text();
    const std::string& needle = in[1].as_text();
    t.visit(0);
    std::size_t i = 0;
    bool found = false;
    while (true) {
        t.visit(1);
        if (i + needle.size() > hay.size()) break;
        if (hay.compare(i, needle.size(), needle) == 0) {
            found = true;
            break;
        }
        ++i;
    }
    t.visit(found ? 2 : 3);
    return RuntimeValue::boolean(found);
}

std::optional<RuntimeValue> binomial_coefficient(std::span<const RuntimeValue> in,
                                                 Tracer& t) {
    std::int64_t n = in[0].as_number();
    std::int64_t k = in[1].as_number();
    t.visit(0);
    if (n < 0 || k < 0 || k > n) {
        t.visit(2);
        return RuntimeValue::number(0);
    }
    std::int64_t kk = std::min(k, n - k);
    std::int64_t r = 1;
    std::int64_t i = 0;
    while (true) {
        t.visit(1);
        if (i >= kk) break;
        // Multiply-then-divide keeps each partial product an exact binomial.
        r = r * (n - kk + i + 1) / (i + 1);
        ++i;
    }
    t.visit(2);
    return RuntimeValue::number(r);
}

bool anagram_helper(const std::string& a, std::string b, Tracer& t) {
    Tracer::DepthGuard guard(t);
    t.visit(1);
    if (a.empty()) {
        t.visit(2);
        return true;
    }
    std::size_t pos = b.find(a[0]);
    if (pos == std::string::npos) {
        t.visit(3);
        return false;
    }
    b.erase(pos, 1);
    return anagram_helper(a.substr(1), std::move(b), t);
}

std::optional<RuntimeValue> anagram_recursive(std::span<const RuntimeValue> in,
                                              Tracer& t) {
    const std::string& a = in[0].as_text();
    const std::string& b = in[1].as_text();
    t.visit(0);
    if (a.size() != b.size()) {
        t.visit(3);
        return RuntimeValue::boolean(false);
    }
    return RuntimeValue::boolean(anagram_helper(a, b, t));
}

// mode starting with a vowel asks "is every character a vowel"; any other
// non-empty mode asks "does the text contain a vowel". The scan looks for a
// witness character that settles the question early.
std::optional<RuntimeValue> vowels(std::span<const RuntimeValue> in, Tracer& t) {
    const std::string& s = in[0].as_text();
    const std::string& mode = in[1].as_text();
    t.visit(0);
    if (mode.empty()) {
        t.visit(3);
        return RuntimeValue::boolean(false);
    }
    bool all_mode = is_vowel(mode[0]);
    std::size_t i = 0;
    bool witness = false;
    while (true) {
        t.visit(1);
        if (i >= s.size()) break;
        bool v = is_vowel(s[i]);
        if (all_mode ? !v : v) {
            witness = true;
            break;
        }
        ++i;
    }
    if (witness) {
        t.visit(2);
        return RuntimeValue::boolean(!all_mode);
    }
    t.visit(3);
    return RuntimeValue::boolean(all_mode);
}

// Remainder normalised into [0, |b|); b == 0 is a domain error.
std::optional<RuntimeValue> remainder_normalised(std::span<const RuntimeValue> in,
                                                 Tracer& t) {
    std::int64_t a = in[0].as_number();
    std::int64_t b = in[1].as_number();
    t.visit(0);
    if (b == 0) {
        t.visit(6);
        return std::nullopt;
    }
    t.visit(1);
    if (b < 0) {
        t.visit(2);
        b = -b;
    }
    t.visit(3);
    std::int64_t r = a % b;
    if (r < 0) {
        t.visit(4);
        r += b;
    }
    t.visit(5);
    return RuntimeValue::number(r);
}

std::optional<RuntimeValue> is_prime(std::span<const RuntimeValue> in,
                                     Tracer& t) {
    std::int64_t n = in[0].as_number();
    t.visit(0);
    std::int64_t i = 2;
    while (true) {
        t.visit(1);
        if (n < 2 || i * i > n) {
            t.visit(3);
            return RuntimeValue::boolean(n >= 2);
        }
        t.visit(2);
        if (n % i == 0) {
            t.visit(4);
            return RuntimeValue::boolean(false);
        }
        ++i;
    }
}

std::optional<RuntimeValue> anagram_iterative(std::span<const RuntimeValue> in,
                                              Tracer& t) {
    const std::string& a = in[0].as_text();
    const std::string& b = in[1].as_text();
    t.visit(0);
    std::array<int, 256> histogram{};
    std::size_t m = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (true) {
        t.visit(1);
        if (i >= m) break;
        t.visit(2);
        ++histogram[static_cast<unsigned char>(a[i])];
        --histogram[static_cast<unsigned char>(b[i])];
        ++i;
    }
    t.visit(3);
    bool equal = a.size() == b.size() &&
                 std::all_of(histogram.begin(), histogram.end(),
                             [](int c) { return c == 0; });
    return RuntimeValue::boolean(equal);
}

// ---- registry ------------------------------------------------------------

SutDescriptor make_sut(std::string name, std::vector<ValueKind> params,
                       ValueKind ret, CfgGraph graph, SutBody body,
                       std::int64_t numeric_abs_max = default_numeric_bound) {
    SutDescriptor d{std::move(name),
                    Signature{std::move(params), ret},
                    std::move(graph),
                    std::move(body),
                    default_step_limit,
                    default_recursion_limit,
                    InputClamp{}};
    d.clamp.numeric_abs_max = numeric_abs_max;
    return d;
}

std::vector<SutDescriptor> make_registry() {
    using VK = ValueKind;
    std::vector<SutDescriptor> r;
    r.reserve(20);

    r.push_back(make_sut("Palindrome - Iterative", {VK::Text}, VK::Boolean,
                         line_loop_graph(), palindrome_iterative));
    r.push_back(make_sut("Palindrome - Recursive", {VK::Text}, VK::Boolean,
                         line_loop_graph(), palindrome_recursive));
    // fib(93) overflows a signed 64-bit integer, so the order is capped at 92.
    r.push_back(make_sut("Fibonacci - Iterative", {VK::Numeric}, VK::Numeric,
                         line_loop_graph(), fibonacci_iterative, 92));
    r.push_back(make_sut("Fibonacci - Recursive", {VK::Numeric}, VK::Numeric,
                         line_loop_graph(), fibonacci_recursive, 92));
    r.push_back(make_sut("Euclidean - Iterative", {VK::Numeric, VK::Numeric},
                         VK::Numeric, line_loop_graph(), euclidean_iterative));
    r.push_back(make_sut("Euclidean - Recursive", {VK::Numeric, VK::Numeric},
                         VK::Numeric, line_loop_graph(), euclidean_recursive));
    r.push_back(make_sut("Mandelbrot", {VK::Numeric, VK::Numeric}, VK::Numeric,
                         line_loop_graph(), mandelbrot));
    r.push_back(make_sut("True", {VK::Boolean}, VK::Boolean, diamond_graph(),
                         always_true));
    r.push_back(make_sut("TrueOrFalse", {VK::Boolean}, VK::Boolean,
                         diamond_graph(), true_or_false));
    r.push_back(make_sut("And", {VK::Boolean, VK::Boolean}, VK::Boolean,
                         diamond_graph(), boolean_and));
    r.push_back(make_sut("Or", {VK::Boolean, VK::Boolean}, VK::Boolean,
                         diamond_graph(), boolean_or));
    r.push_back(make_sut("AndOr", {VK::Boolean, VK::Boolean}, VK::Boolean,
                         three_way_graph(), and_or));
    r.push_back(make_sut("Xor", {VK::Boolean, VK::Boolean}, VK::Boolean,
                         three_way_graph(), boolean_xor));
    r.push_back(make_sut("Substring", {VK::Text, VK::Text}, VK::Boolean,
                         scan_graph(), substring));
    // C(60, 30) is the largest order whose partial products stay in range.
    r.push_back(make_sut("BinomialCoefficient", {VK::Numeric, VK::Numeric},
                         VK::Numeric, guarded_loop_graph(), binomial_coefficient,
                         60));
    r.push_back(make_sut("Anagram - Recursive", {VK::Text, VK::Text},
                         VK::Boolean, guarded_scan_graph(), anagram_recursive));
    r.push_back(make_sut("Vowels", {VK::Text, VK::Text}, VK::Boolean,
                         guarded_scan_graph(), vowels));
    r.push_back(make_sut("Remainder", {VK::Numeric, VK::Numeric}, VK::Numeric,
                         sign_fixup_graph(), remainder_normalised));
    r.push_back(make_sut("IsPrime", {VK::Numeric}, VK::Boolean,
                         trial_division_graph(), is_prime));
    r.push_back(make_sut("Anagram - Iterative", {VK::Text, VK::Text},
                         VK::Boolean, counted_body_graph(), anagram_iterative));
    return r;
}

std::string normalise_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

const std::unordered_map<std::string, std::size_t>& name_index() {
    static const std::unordered_map<std::string, std::size_t> index = [] {
        std::unordered_map<std::string, std::size_t> m;
        const auto& reg = registry();
        for (std::size_t i = 0; i < reg.size(); ++i) {
            m.emplace(normalise_name(reg[i].name), i);
        }
        // Historical spellings.
        m.emplace("euclideanalgorithmiterative", m.at("euclideaniterative"));
        m.emplace("euclideanalgorithmrecursive", m.at("euclideanrecursive"));
        m.emplace("fibonnaciiterative", m.at("fibonacciiterative"));
        m.emplace("fibonnacirecursive", m.at("fibonaccirecursive"));
        return m;
    }();
    return index;
}

} // namespace

const std::vector<SutDescriptor>& registry() {
    static const std::vector<SutDescriptor> reg = make_registry();
    return reg;
}

const SutDescriptor* find_sut(std::string_view name) {
    const auto& index = name_index();
    auto it = index.find(normalise_name(name));
    if (it == index.end()) return nullptr;
    return &registry()[it->second];
}

std::size_t registry_index(const SutDescriptor& sut) {
    const auto& reg = registry();
    for (std::size_t i = 0; i < reg.size(); ++i) {
        if (&reg[i] == &sut) return i;
    }
    const SutDescriptor* named = find_sut(sut.name);
    if (named != nullptr) return static_cast<std::size_t>(named - reg.data());
    throw ContractError("component is not part of the registry: " + sut.name);
}

std::string sut_slug(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool pending_dash = false;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (pending_dash && !out.empty()) out.push_back('-');
            pending_dash = false;
            out.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(c))));
        } else {
            pending_dash = true;
        }
    }
    return out;
}

RuntimeValue clamp_input(const RuntimeValue& value, const InputClamp& clamp) {
    switch (value.kind()) {
        case ValueKind::Numeric: {
            std::int64_t n = value.as_number();
            n = std::clamp(n, -clamp.numeric_abs_max, clamp.numeric_abs_max);
            return RuntimeValue::number(n);
        }
        case ValueKind::Text: {
            const std::string& s = value.as_text();
            if (s.size() <= clamp.text_max_chars) return value;
            return RuntimeValue::text(s.substr(0, clamp.text_max_chars));
        }
        case ValueKind::Boolean:
            return value;
    }
    throw ContractError("unreachable value kind");
}

SutResponse invoke(const SutDescriptor& sut, std::span<const RuntimeValue> inputs) {
    if (inputs.size() != sut.signature.param_kinds.size()) {
        throw ContractError("component " + sut.name + " expects " +
                            std::to_string(sut.signature.param_kinds.size()) +
                            " inputs, got " + std::to_string(inputs.size()));
    }
    std::vector<RuntimeValue> clamped;
    clamped.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].kind() != sut.signature.param_kinds[i]) {
            throw ContractError("component " + sut.name + " input " +
                                std::to_string(i) + " expects " +
                                kind_name(sut.signature.param_kinds[i]) +
                                ", got " + kind_name(inputs[i].kind()));
        }
        clamped.push_back(clamp_input(inputs[i], sut.clamp));
    }

    Tracer tracer(sut.step_limit, sut.recursion_limit);
    SutResponse response;
    try {
        std::optional<RuntimeValue> value = sut.body(clamped, tracer);
        response.trace = tracer.take();
        if (value.has_value()) {
            if (value->kind() != sut.signature.return_kind) {
                throw ContractError("component " + sut.name +
                                    " returned the wrong kind");
            }
            response.value = std::move(value);
        } else {
            response.failed = true;
        }
    } catch (const GuardTripped&) {
        response.trace = tracer.take();
        response.failed = true;
    }
    return response;
}

} // namespace gmpforge
