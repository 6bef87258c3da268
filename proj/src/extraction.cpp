#include "bugrepro/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <string_view>
#include <vector>

#include "bugrepro/errors.hpp"
#include "bugrepro/ioutil.hpp"

namespace bugrepro {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::string join_lines(const std::vector<std::string_view>& lines, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) {
            out.push_back('\n');
        }
        out.append(lines[i]);
    }
    return out;
}

bool is_fence_line(std::string_view line) {
    return trim(line).rfind("```", 0) == 0;
}

bool starts_with_token(const std::string& t, std::string_view kw) {
    if (t.rfind(std::string(kw), 0) != 0) {
        return false;
    }
    return t.size() == kw.size() || std::isspace(static_cast<unsigned char>(t[kw.size()]));
}

enum class LineKind { code, neutral, prose };

// The code-line heuristic: a line looks like code when it ends with ';', '{'
// or '}', or starts with import/package/@/public/private. Blank and comment
// lines are neutral: they extend a run without starting or ending one.
LineKind classify_line(std::string_view line) {
    const std::string t = trim(line);
    if (t.empty()) {
        return LineKind::neutral;
    }
    if (t.rfind("//", 0) == 0 || t.rfind("/*", 0) == 0 || t.rfind("*", 0) == 0) {
        return LineKind::neutral;
    }
    const char last = t.back();
    if (last == ';' || last == '{' || last == '}') {
        return LineKind::code;
    }
    if (t[0] == '@') {
        return LineKind::code;
    }
    if (starts_with_token(t, "import") || starts_with_token(t, "package") ||
        starts_with_token(t, "public") || starts_with_token(t, "private")) {
        return LineKind::code;
    }
    return LineKind::prose;
}

// Maximal contiguous run of code lines (neutral lines allowed inside),
// trimmed so the run starts and ends on a code line. Ties go to the first.
struct Run {
    std::size_t first = 0;
    std::size_t last = 0; // inclusive
    bool found = false;
    std::size_t length() const { return found ? last - first + 1 : 0; }
};

Run best_code_run(const std::vector<std::string_view>& lines) {
    Run best;
    std::optional<std::size_t> run_first_code;
    std::size_t run_last_code = 0;
    auto close_run = [&]() {
        if (run_first_code) {
            Run cur{*run_first_code, run_last_code, true};
            if (!best.found || cur.length() > best.length()) {
                best = cur;
            }
        }
        run_first_code.reset();
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
        switch (classify_line(lines[i])) {
        case LineKind::code:
            if (!run_first_code) {
                run_first_code = i;
            }
            run_last_code = i;
            break;
        case LineKind::neutral:
            break;
        case LineKind::prose:
            close_run();
            break;
        }
    }
    close_run();
    return best;
}

const std::set<std::string>& java_keywords() {
    static const std::set<std::string> kws = {
        "new",   "return", "if",    "else",      "while",  "for",     "switch",       "case",
        "do",    "throw",  "throws", "catch",    "class",  "interface", "enum",       "package",
        "import", "assert", "super", "this",     "break",  "continue", "synchronized"};
    return kws;
}

// Position just past the ')' matching the '(' at `open`, or npos.
std::size_t match_paren(const std::string& text, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
        if (text[i] == '(') {
            ++depth;
        } else if (text[i] == ')') {
            if (--depth == 0) {
                return i + 1;
            }
        }
    }
    return std::string::npos;
}

// True when the declaration whose parameter list ends at `after_params` opens
// a body (possibly after a throws clause).
bool has_body(const std::string& text, std::size_t after_params) {
    std::size_t i = after_params;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (text.compare(i, 6, "throws") == 0) {
        while (i < text.size() && text[i] != '{' && text[i] != ';' && text[i] != '=') ++i;
    }
    return i < text.size() && text[i] == '{';
}

} // namespace

ParsedTestCase extract_test(const std::string& raw_response) {
    ParsedTestCase parsed;
    const auto lines = split_lines(raw_response);

    std::vector<std::string> blocks;
    bool in_block = false;
    std::vector<std::string_view> block_lines;
    for (const auto& line : lines) {
        if (is_fence_line(line)) {
            if (!in_block) {
                in_block = true; // any language tag on the opening fence is dropped with it
                block_lines.clear();
            } else {
                blocks.push_back(join_lines(block_lines, 0, block_lines.size()));
                in_block = false;
            }
            continue;
        }
        if (in_block) {
            block_lines.push_back(line);
        }
    }
    if (in_block) {
        blocks.push_back(join_lines(block_lines, 0, block_lines.size()));
        parsed.extraction_notes.push_back("unterminated code fence; block runs to end of response");
    }

    if (!blocks.empty()) {
        parsed.code_block_count = static_cast<int>(blocks.size());
        std::string unit;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (i > 0) {
                unit.push_back('\n');
            }
            unit += blocks[i];
        }
        parsed.source_text = std::move(unit);
    } else {
        const Run run = best_code_run(lines);
        if (!run.found) {
            throw NoCodeFound("response contains neither fenced blocks nor code-looking lines");
        }
        parsed.code_block_count = 0;
        parsed.source_text = join_lines(lines, run.first, run.last + 1);
        parsed.extraction_notes.push_back("no fenced block; heuristic extraction");
    }

    parsed.detected_test_methods = detect_test_methods(parsed.source_text);
    parsed.detected_class_name = detect_class_name(parsed.source_text);
    return parsed;
}

std::vector<std::string> detect_test_methods(const std::string& source_text) {
    static const std::regex method_re(R"(([A-Za-z_$][\w$.<>\[\]]*)\s+([A-Za-z_$][\w$]*)\s*\()");
    static const std::regex test_annotation_re(
        R"(@\s*(?:[A-Za-z_$][\w$]*\.)*(?:Test|ParameterizedTest|RepeatedTest|TestFactory|TestTemplate)\b)");

    std::vector<std::string> methods;
    std::set<std::string> seen;
    std::size_t prev_end = 0;

    auto begin = std::sregex_iterator(source_text.begin(), source_text.end(), method_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        const std::string returnish = m[1].str();
        const std::string name = m[2].str();
        if (java_keywords().count(returnish) || java_keywords().count(name)) {
            continue;
        }
        const std::size_t open = static_cast<std::size_t>(m.position(0)) + m[0].str().size() - 1;
        const std::size_t after = match_paren(source_text, open);
        if (after == std::string::npos || !has_body(source_text, after)) {
            continue;
        }
        const std::string gap =
            source_text.substr(prev_end, static_cast<std::size_t>(m.position(0)) - prev_end);
        const bool annotated = std::regex_search(gap, test_annotation_re);
        prev_end = after;
        if ((annotated || name.rfind("test", 0) == 0) && seen.insert(name).second) {
            methods.push_back(name);
        }
    }
    return methods;
}

std::optional<std::string> detect_class_name(const std::string& source_text) {
    static const std::regex class_re(R"(\b(?:class|interface|enum)\s+([A-Za-z_$][\w$]*))");
    std::smatch m;
    if (std::regex_search(source_text, m, class_re)) {
        return m[1].str();
    }
    return std::nullopt;
}

} // namespace bugrepro
