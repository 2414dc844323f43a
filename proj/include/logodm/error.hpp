#pragma once

#include <stdexcept>
#include <string>

namespace logodm {

/// Error categories raised by the library. Each maps to one failure mode of
/// the public operations; CLI layers translate them into exit diagnostics.
enum class errc {
    malformed_code,       // coded-flag digit outside {0,1}
    code_overflow,        // coded-flag raw value has too many digits
    unknown_flag,         // flag label not in the attribute's flag_names
    schema_conflict,      // shared join attribute with conflicting descriptors
    disjoint_schema,      // join with no shared attribute
    unknown_attribute,    // projection/selection names a non-existent attribute
    policy_precondition,  // imputation policy preconditions violated
    unimputed_data,       // Missing cell where none is allowed
    shape_mismatch,       // column length mismatch
    parameter,            // out-of-domain parameter value
    schema_mismatch,      // schema-level structural problem
    empty_input,          // operation requires at least one record
    insufficient_data,    // stratification demands more records per class
    validation,           // record data fails schema validation
    io,                   // file not readable/parsable
    config,               // pipeline configuration invalid
};

constexpr const char* errc_name(errc c) noexcept {
    switch (c) {
        case errc::malformed_code: return "malformed-code";
        case errc::code_overflow: return "code-overflow";
        case errc::unknown_flag: return "unknown-flag";
        case errc::schema_conflict: return "schema-conflict";
        case errc::disjoint_schema: return "disjoint-schema";
        case errc::unknown_attribute: return "unknown-attribute";
        case errc::policy_precondition: return "policy-precondition";
        case errc::unimputed_data: return "unimputed-data";
        case errc::shape_mismatch: return "shape-mismatch";
        case errc::parameter: return "parameter";
        case errc::schema_mismatch: return "schema";
        case errc::empty_input: return "empty-input";
        case errc::insufficient_data: return "insufficient-data";
        case errc::validation: return "validation";
        case errc::io: return "io";
        case errc::config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Error(errc code, const std::string& message, int position)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code),
          position_(position) {}

    [[nodiscard]] errc code() const noexcept { return code_; }

    /// Digit position for malformed-code errors (0 = least significant); -1 otherwise.
    [[nodiscard]] int position() const noexcept { return position_; }

private:
    errc code_;
    int position_ = -1;
};

}  // namespace logodm
