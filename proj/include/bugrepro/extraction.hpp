#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bugrepro {

struct ParsedTestCase {
    std::string source_text; // candidate compilation unit, no fence delimiters
    int code_block_count = 0;
    std::vector<std::string> detected_test_methods; // textual order
    std::optional<std::string> detected_class_name;
    std::vector<std::string> extraction_notes;
};

// Strips natural-language prose from a raw model response. With fenced code
// blocks present, the unit is the concatenation of all block contents in
// order; otherwise the maximal contiguous run of code-looking lines is taken.
// Throws NoCodeFound when neither yields anything. The unit is never
// repaired: no imports added, no renames, no syntax fixes.
ParsedTestCase extract_test(const std::string& raw_response);

// Names of methods annotated as tests (@Test and common variants) or named
// with the conventional "test" prefix, in order of appearance.
std::vector<std::string> detect_test_methods(const std::string& source_text);

// First class/interface declaration name, if any.
std::optional<std::string> detect_class_name(const std::string& source_text);

} // namespace bugrepro
