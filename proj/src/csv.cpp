#include "mecanchor/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace mecanchor::csv {

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";  // folds -0
    }
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::vector<std::string> split_record(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

Writer& Writer::field(std::string_view value) {
    if (!first_) {
        out_ << ',';
    }
    out_ << escape(value);
    first_ = false;
    return *this;
}

Writer& Writer::field(double value) { return field(std::string_view(format_number(value))); }

Writer& Writer::field(std::int64_t value) { return field(std::string_view(std::to_string(value))); }

void Writer::end_row() {
    out_ << '\n';
    first_ = true;
}

void Writer::header(const std::vector<std::string>& names) {
    for (const auto& name : names) {
        field(name);
    }
    end_row();
}

}  // namespace mecanchor::csv
