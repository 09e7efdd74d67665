// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_DIAGNOSTICS_HPP_
#define DYW_DIAGNOSTICS_HPP_

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyw {

/// 1-based position inside a model document.
struct SourceLoc {
    std::size_t line = 0;
    std::size_t column = 0;

    bool valid() const { return line > 0 && column > 0; }
};

inline std::string to_string(const SourceLoc& loc) {
    std::ostringstream os;
    os << loc.line << ':' << loc.column;
    return os.str();
}

struct Diagnostic {
    SourceLoc loc;
    std::string message;
};

inline std::string format(const Diagnostic& d) {
    return to_string(d.loc) + ": " + d.message;
}

inline std::string format(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) {
        out += format(d);
        out += '\n';
    }
    return out;
}

/// Search gave up before reaching a conclusion. Distinct from a negative
/// answer: callers must not treat it as "not derivable".
class InconclusiveError : public std::runtime_error {
public:
    explicit InconclusiveError(const std::string& what) : std::runtime_error(what) {}
};

/// Active-attacker strategy space grew past the configured cap.
class StrategyCapError : public std::runtime_error {
public:
    StrategyCapError(const std::string& what, std::vector<std::size_t> lines)
        : std::runtime_error(what), message_lines(std::move(lines)) {}

    /// Indices of the message lines responsible for the blow-up.
    std::vector<std::size_t> message_lines;
};

}  // namespace dyw

#endif  // DYW_DIAGNOSTICS_HPP_
