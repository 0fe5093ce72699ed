#pragma once

/// Deterministic report serialization.
///
/// Report files must be byte-identical across runs of the same config, so
/// numbers are printed through one fixed code path (17 significant digits,
/// shortest C locale form) and JSON objects keep insertion order instead of
/// sorting or hashing keys.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bhl/error.hpp"

namespace bhl {

/// Fixed float formatting used in every emitted file: %.17g, C locale.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// JSON document tree with deterministic serialization.  Arrays and objects
/// hold values by unique_ptr-free copy; objects preserve insertion order.
class json_value {
public:
    using array = std::vector<json_value>;
    using object = std::vector<std::pair<std::string, json_value>>;

    json_value() : data_(nullptr) {}
    json_value(std::nullptr_t) : data_(nullptr) {}
    json_value(bool b) : data_(b) {}
    json_value(int v) : data_(static_cast<std::int64_t>(v)) {}
    json_value(std::int64_t v) : data_(v) {}
    json_value(std::size_t v) : data_(static_cast<std::int64_t>(v)) {}
    json_value(double v) : data_(v) {}
    json_value(const char* s) : data_(std::string(s)) {}
    json_value(std::string s) : data_(std::move(s)) {}
    json_value(array a) : data_(std::move(a)) {}
    json_value(object o) : data_(std::move(o)) {}

    static json_value make_object() { return json_value(object{}); }
    static json_value make_array() { return json_value(array{}); }

    /// Appends a key; keys are expected unique (no lookup is performed).
    json_value& set(const std::string& key, json_value v) {
        std::get<object>(data_).emplace_back(key, std::move(v));
        return *this;
    }

    json_value& push(json_value v) {
        std::get<array>(data_).push_back(std::move(v));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out.push_back('\n');
        return out;
    }

private:
    static void write_escaped(std::string& out, const std::string& s) {
        out.push_back('"');
        for (unsigned char c : s) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
            }
        }
        out.push_back('"');
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' ');
        const std::string close_pad(static_cast<size_t>(indent * depth), ' ');
        if (std::holds_alternative<std::nullptr_t>(data_)) {
            out += "null";
        } else if (const bool* b = std::get_if<bool>(&data_)) {
            out += *b ? "true" : "false";
        } else if (const std::int64_t* i = std::get_if<std::int64_t>(&data_)) {
            out += std::to_string(*i);
        } else if (const double* d = std::get_if<double>(&data_)) {
            // NaN and infinities have no JSON encoding; report absence instead
            if (*d != *d || *d > 1.7976931348623157e308 || *d < -1.7976931348623157e308)
                out += "null";
            else
                out += format_double(*d);
        } else if (const std::string* s = std::get_if<std::string>(&data_)) {
            write_escaped(out, *s);
        } else if (const array* a = std::get_if<array>(&data_)) {
            if (a->empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < a->size(); ++i) {
                out += pad;
                (*a)[i].write(out, indent, depth + 1);
                out += (i + 1 < a->size() ? ",\n" : "\n");
            }
            out += close_pad + "]";
        } else if (const object* o = std::get_if<object>(&data_)) {
            if (o->empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            for (size_t i = 0; i < o->size(); ++i) {
                out += pad;
                write_escaped(out, (*o)[i].first);
                out += ": ";
                (*o)[i].second.write(out, indent, depth + 1);
                out += (i + 1 < o->size() ? ",\n" : "\n");
            }
            out += close_pad + "}";
        }
    }

    std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, array, object> data_;
};

/// CSV field escaping: RFC 4180 quoting when the field contains a comma,
/// quote or newline.
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

/// CSV table with a fixed header; rows are appended as preformatted fields.
/// All lines end with LF.
class csv_table {
public:
    explicit csv_table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> fields) {
        if (fields.size() != header_.size())
            fail(errc::io_error, "csv row width does not match header");
        rows_.push_back(std::move(fields));
    }

    std::string dump() const {
        std::string out = join(header_);
        for (const auto& row : rows_) out += join(row);
        return out;
    }

    size_t row_count() const { return rows_.size(); }

private:
    static std::string join(const std::vector<std::string>& fields) {
        std::string line;
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) line.push_back(',');
            line += csv_escape(fields[i]);
        }
        line.push_back('\n');
        return line;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(errc::io_error, "write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open '" + path + "' for reading");
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (in.bad()) fail(errc::io_error, "read from '" + path + "' failed");
    return content;
}

} // namespace bhl
