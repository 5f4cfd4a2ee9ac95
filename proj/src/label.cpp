#include "factcheck/label.hpp"

#include "factcheck/error.hpp"

namespace factcheck {

std::string_view to_string(Label label)
{
    switch (label) {
    case Label::supports:
        return "SUPPORTS";
    case Label::refutes:
        return "REFUTES";
    case Label::nei:
        return "NEI";
    }
    return "?";
}

Label parse_label(std::string_view text)
{
    if (text == "SUPPORTS") {
        return Label::supports;
    }
    if (text == "REFUTES") {
        return Label::refutes;
    }
    if (text == "NEI" || text == "NOT ENOUGH INFO") {
        return Label::nei;
    }
    throw FormatError("unknown label '" + std::string(text) + "'");
}

}  // namespace factcheck
