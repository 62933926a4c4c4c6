#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mecanchor::csv {

/// Shortest round-trip decimal representation, '.' separator, locale-free.
std::string format_number(double value);

/// RFC 4180 field quoting: fields containing `,`, `"`, CR or LF are quoted.
std::string escape(std::string_view field);

/// Splits one RFC 4180 record (no embedded newlines).
std::vector<std::string> split_record(std::string_view line);

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    Writer& field(std::string_view value);
    Writer& field(const char* value) { return field(std::string_view(value)); }
    Writer& field(const std::string& value) { return field(std::string_view(value)); }
    Writer& field(double value);
    Writer& field(std::int64_t value);
    Writer& field(int value) { return field(static_cast<std::int64_t>(value)); }
    Writer& field(std::size_t value) { return field(static_cast<std::int64_t>(value)); }
    void end_row();

    void header(const std::vector<std::string>& names);

private:
    std::ostream& out_;
    bool first_ = true;
};

}  // namespace mecanchor::csv
