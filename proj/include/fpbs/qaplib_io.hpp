#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpbs/instance.hpp"

namespace fpbs {

// Parse failure with the byte offset of the offending position.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

namespace detail {

// Whitespace-separated integer scanner that tracks byte offsets.
class IntScanner {
public:
    explicit IntScanner(std::string_view text) : text_(text) {}

    std::size_t offset() const { return pos_; }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    long long next(const char* what) {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= text_.size())
            throw ParseError(std::string("unexpected end of input while reading ") + what,
                             pos_);
        bool negative = false;
        if (text_[pos_] == '+' || text_[pos_] == '-') {
            negative = text_[pos_] == '-';
            ++pos_;
        }
        unsigned long long magnitude = 0;
        std::size_t digits = 0;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            magnitude = magnitude * 10 + static_cast<unsigned long long>(text_[pos_] - '0');
            if (magnitude > (1ULL << 62))
                throw ParseError(std::string("integer out of range for ") + what, start);
            ++pos_;
            ++digits;
        }
        const bool token_continues =
            pos_ < text_.size() &&
            !std::isspace(static_cast<unsigned char>(text_[pos_]));
        if (digits == 0 || token_continues)
            throw ParseError(std::string("non-integer token while reading ") + what, start);
        const long long value = static_cast<long long>(magnitude);
        return negative ? -value : value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// QAPLIB .dat format: an integer n followed by exactly 2*n*n integers,
// first the flow matrix then the distance matrix, any whitespace layout.
// Strict token counting: trailing non-whitespace content is an error.
inline QapInstance parse_instance(std::string_view text, std::string name = "") {
    detail::IntScanner scan(text);
    const std::size_t n_offset = scan.offset();
    const long long n_value = scan.next("problem size n");
    if (n_value < 2)
        throw ParseError("problem size n must be >= 2, got " + std::to_string(n_value),
                         n_offset);
    if (n_value > 10000) throw ParseError("problem size n is implausibly large", n_offset);
    const int n = static_cast<int>(n_value);

    QapInstance inst;
    inst.name = std::move(name);
    inst.n = n;
    inst.flow = SquareMatrix<long long>(n);
    inst.dist = SquareMatrix<long long>(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            try {
                inst.flow(i, j) = scan.next("flow matrix entry");
            } catch (const ParseError& e) {
                throw ParseError("flow matrix truncated or malformed: " +
                                     std::string(e.what()),
                                 e.offset);
            }
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            try {
                inst.dist(i, j) = scan.next("distance matrix entry");
            } catch (const ParseError& e) {
                throw ParseError("distance matrix truncated or malformed: " +
                                     std::string(e.what()),
                                 e.offset);
            }
        }
    if (!scan.at_end())
        throw ParseError("trailing content after 2*n*n matrix entries", scan.offset());
    return inst;
}

inline std::string serialize_instance(const QapInstance& inst) {
    std::ostringstream out;
    out << inst.n << "\n\n";
    for (int i = 0; i < inst.n; ++i) {
        for (int j = 0; j < inst.n; ++j) out << (j ? " " : "") << inst.flow(i, j);
        out << "\n";
    }
    out << "\n";
    for (int i = 0; i < inst.n; ++i) {
        for (int j = 0; j < inst.n; ++j) out << (j ? " " : "") << inst.dist(i, j);
        out << "\n";
    }
    return out.str();
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Loads an instance file; the instance name defaults to the file stem
// (e.g. "tai40a" for /path/tai40a.dat).
inline QapInstance load_instance(const std::filesystem::path& path) {
    return parse_instance(read_text_file(path), path.stem().string());
}

// Registry of best-known objective values, keyed by instance name.
// CSV exchange format: header `name,bkv`, one instance per line.
class BkvRegistry {
public:
    static BkvRegistry builtin();

    static BkvRegistry from_csv(std::string_view text) {
        BkvRegistry reg;
        std::size_t pos = 0;
        std::size_t line_no = 0;
        while (pos <= text.size()) {
            const std::size_t eol = text.find('\n', pos);
            std::string_view line =
                text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                               : eol - pos);
            pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            ++line_no;
            line = trim(line);
            if (line.empty() || line.front() == '#') continue;
            if (line_no == 1 && line == "name,bkv") continue;
            const std::size_t comma = line.find(',');
            if (comma == std::string_view::npos)
                throw std::runtime_error("bkv csv line " + std::to_string(line_no) +
                                         ": expected name,bkv");
            const std::string name(trim(line.substr(0, comma)));
            const std::string value_text(trim(line.substr(comma + 1)));
            long long value = 0;
            try {
                std::size_t used = 0;
                value = std::stoll(value_text, &used);
                if (used != value_text.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error("bkv csv line " + std::to_string(line_no) +
                                         ": bad value '" + value_text + "'");
            }
            if (name.empty() || value <= 0)
                throw std::runtime_error("bkv csv line " + std::to_string(line_no) +
                                         ": bkv must be a positive integer");
            reg.values_[name] = value;
        }
        return reg;
    }

    std::optional<long long> lookup(const std::string& name) const {
        const auto it = values_.find(name);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    // Entries of `other` override or extend this registry.
    void merge(const BkvRegistry& other) {
        for (const auto& [name, value] : other.values_) values_[name] = value;
    }

    std::size_t size() const { return values_.size(); }
    const std::map<std::string, long long>& entries() const { return values_; }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    }

    std::map<std::string, long long> values_;
};

// The 21 hard QAPLIB instances shipped by default.
inline BkvRegistry BkvRegistry::builtin() {
    BkvRegistry reg;
    reg.values_ = {
        {"tai40a", 3139370},     {"tai50a", 4938796},  {"tai60a", 7205962},
        {"tai80a", 13499184},    {"tai100a", 21052466},{"tai50b", 458821517},
        {"tai60b", 608215054},   {"tai80b", 818415043},{"tai100b", 1185996137},
        {"tai150b", 498896643},  {"sko72", 66256},     {"sko81", 90998},
        {"sko90", 115534},       {"sko100a", 152002},  {"sko100b", 153890},
        {"sko100c", 147862},     {"sko100d", 149576},  {"sko100e", 149150},
        {"sko100f", 149036},     {"wil100", 273038},   {"tho150", 8133398},
    };
    return reg;
}

// Solution file: `name n value` on the first line, then the n assigned
// locations pi(1)..pi(n), 1-indexed, space-separated, on the second.
struct SolutionFile {
    std::string name;
    int n = 0;
    long long value = 0;
    std::vector<int> pi;  // 0-indexed locations in memory
};

inline std::string write_solution(const SolutionFile& sol) {
    std::ostringstream out;
    out << sol.name << " " << sol.n << " " << sol.value << "\n";
    for (int i = 0; i < sol.n; ++i) out << (i ? " " : "") << sol.pi[i] + 1;
    out << "\n";
    return out.str();
}

inline SolutionFile read_solution(std::string_view text) {
    std::istringstream in{std::string(text)};
    SolutionFile sol;
    if (!(in >> sol.name >> sol.n >> sol.value) || sol.n < 1)
        throw std::runtime_error("solution file: malformed header line");
    sol.pi.resize(sol.n);
    std::vector<char> seen(sol.n, 0);
    for (int i = 0; i < sol.n; ++i) {
        int loc = 0;
        if (!(in >> loc) || loc < 1 || loc > sol.n)
            throw std::runtime_error("solution file: bad location at position " +
                                     std::to_string(i + 1));
        if (seen[loc - 1])
            throw std::runtime_error("solution file: duplicate location " +
                                     std::to_string(loc));
        seen[loc - 1] = 1;
        sol.pi[i] = loc - 1;
    }
    return sol;
}

}  // namespace fpbs
