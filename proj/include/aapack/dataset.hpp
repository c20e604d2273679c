#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aapack/aap.hpp"
#include "aapack/errors.hpp"
#include "aapack/game.hpp"

namespace aapack {

/// Minimal RFC 4180 reader: comma separated, optional double-quoted fields
/// with "" escapes, LF or CRLF line ends, leading UTF-8 BOM ignored.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {
        if (in_.peek() == 0xEF) {
            char bom[3];
            in_.read(bom, 3);
            if (!(bom[0] == '\xEF' && bom[1] == '\xBB' && bom[2] == '\xBF'))
                throw DataError("unexpected leading bytes", 1);
        }
    }

    /// Next record, or nullopt at end of input. `line()` afterwards is the
    /// 1-based line the record started on.
    std::optional<std::vector<std::string>> next() {
        if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
        record_line_ = line_ + 1;
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        bool was_quoted = false;
        for (;;) {
            const int c = in_.get();
            if (c == std::char_traits<char>::eof()) {
                if (quoted) throw DataError("unterminated quoted field", record_line_);
                ++line_;
                break;
            }
            const char ch = static_cast<char>(c);
            if (quoted) {
                if (ch == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
                continue;
            }
            if (ch == '"' && field.empty() && !was_quoted) {
                quoted = was_quoted = true;
            } else if (ch == ',') {
                fields.push_back(std::move(field));
                field.clear();
                was_quoted = false;
            } else if (ch == '\n') {
                ++line_;
                break;
            } else if (ch != '\r') {
                field.push_back(ch);
            }
        }
        fields.push_back(std::move(field));
        return fields;
    }

    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
};

/// How the game interval [A, B] is fixed before prediction starts.
///
/// explicit_bounds     user-supplied A < B
/// calibration_prefix  min/max of targets and expert predictions over the
///                     first `calibration_packs` months; those months are then
///                     dropped from the stream so no pack is predicted with
///                     bounds derived from its own outcomes
struct ClipPolicy {
    enum class Kind { explicit_bounds, calibration_prefix };

    Kind kind = Kind::explicit_bounds;
    double lower = 0.0;
    double upper = 1.0;
    std::size_t calibration_packs = 0;

    static ClipPolicy bounds(double lower, double upper) {
        if (!(lower < upper)) throw DomainError("clip policy: need lower < upper");
        return {Kind::explicit_bounds, lower, upper, 0};
    }
    static ClipPolicy calibration(std::size_t packs) {
        if (packs < 1) throw DomainError("clip policy: calibration prefix must cover at least one month");
        return {Kind::calibration_prefix, 0.0, 0.0, packs};
    }
};

struct DatasetSpec {
    std::filesystem::path path;
    std::string timestamp_column;
    std::string target_column;
    std::vector<std::string> expert_columns;
    /// Within-month order; ascending, numeric when every value parses as a
    /// number. File order when absent.
    std::optional<std::string> order_column;
    /// When set, the timestamp column holds a month number 1..12 and this
    /// column holds the year.
    std::optional<std::string> year_column;
    ClipPolicy clip;

    void validate() const {
        if (expert_columns.empty()) throw DomainError("dataset: need at least one expert column");
        std::vector<std::string> names = expert_columns;
        names.push_back(timestamp_column);
        names.push_back(target_column);
        if (order_column) names.push_back(*order_column);
        if (year_column) names.push_back(*year_column);
        std::sort(names.begin(), names.end());
        if (std::adjacent_find(names.begin(), names.end()) != names.end())
            throw DomainError("dataset: column names must be distinct");
    }
};

struct LoadedDataset {
    PackStream stream;
    GameSpec game;
    std::size_t rows = 0;
    std::size_t calibration_packs_dropped = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<int> parse_int(std::string_view s) {
    s = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Month index year*12 + (month-1) from "YYYY-MM" or "YYYY-MM-DD".
inline std::optional<int> parse_year_month(std::string_view s) {
    s = trim(s);
    if (s.size() != 7 && s.size() != 10) return std::nullopt;
    if (s[4] != '-' || (s.size() == 10 && s[7] != '-')) return std::nullopt;
    const auto y = parse_int(s.substr(0, 4));
    const auto m = parse_int(s.substr(5, 2));
    if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
    if (s.size() == 10) {
        const auto d = parse_int(s.substr(8, 2));
        if (!d || *d < 1 || *d > 31) return std::nullopt;
    }
    return *y * 12 + (*m - 1);
}

inline std::string month_label(int key) {
    const int y = key / 12;
    const int m = key % 12 + 1;
    std::ostringstream os;
    os << y << '-' << (m < 10 ? "0" : "") << m;
    return os.str();
}

struct Row {
    int month = 0;
    std::string order_key;
    double target = 0.0;
    std::vector<double> experts;
};

}  // namespace detail

/// Group rows of a timestamped CSV into monthly packs, chronologically.
inline LoadedDataset load_pack_csv(std::istream& in, const DatasetSpec& spec) {
    spec.validate();
    CsvReader reader(in);
    const auto header = reader.next();
    if (!header || (header->size() == 1 && detail::trim((*header)[0]).empty()))
        throw DataError("empty file");

    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header->size(); ++i)
            if (detail::trim((*header)[i]) == name) return i;
        throw SchemaError(name);
    };
    const std::size_t ts_col = column(spec.timestamp_column);
    const std::size_t target_col = column(spec.target_column);
    std::vector<std::size_t> expert_cols;
    for (const auto& e : spec.expert_columns) expert_cols.push_back(column(e));
    const std::optional<std::size_t> order_col =
        spec.order_column ? std::optional(column(*spec.order_column)) : std::nullopt;
    const std::optional<std::size_t> year_col =
        spec.year_column ? std::optional(column(*spec.year_column)) : std::nullopt;

    std::map<int, std::vector<detail::Row>> months;
    std::size_t rows = 0;
    while (auto rec = reader.next()) {
        const std::size_t line = reader.line();
        if (rec->size() == 1 && detail::trim((*rec)[0]).empty()) continue;  // blank line
        if (rec->size() != header->size())
            throw DataError("expected " + std::to_string(header->size()) + " fields, got " +
                            std::to_string(rec->size()),
                            line);
        detail::Row row;
        if (year_col) {
            const auto y = detail::parse_int((*rec)[*year_col]);
            const auto m = detail::parse_int((*rec)[ts_col]);
            if (!y || !m || *m < 1 || *m > 12)
                throw DataError("unparseable timestamp '" + (*rec)[*year_col] + "/" + (*rec)[ts_col] + "'",
                                line);
            row.month = *y * 12 + (*m - 1);
        } else {
            const auto key = detail::parse_year_month((*rec)[ts_col]);
            if (!key) throw DataError("unparseable timestamp '" + (*rec)[ts_col] + "'", line);
            row.month = *key;
        }
        auto real = [&](std::size_t col, const std::string& name) {
            const auto v = detail::parse_real((*rec)[col]);
            if (!v) throw DataError("column '" + name + "': not a number '" + (*rec)[col] + "'", line);
            return *v;
        };
        row.target = real(target_col, spec.target_column);
        for (std::size_t i = 0; i < expert_cols.size(); ++i)
            row.experts.push_back(real(expert_cols[i], spec.expert_columns[i]));
        if (order_col) row.order_key = std::string(detail::trim((*rec)[*order_col]));
        months[row.month].push_back(std::move(row));
        ++rows;
    }

    if (order_col) {
        bool numeric = true;
        for (const auto& [m, rs] : months)
            for (const auto& r : rs) numeric = numeric && detail::parse_real(r.order_key).has_value();
        for (auto& [m, rs] : months)
            std::stable_sort(rs.begin(), rs.end(), [numeric](const detail::Row& a, const detail::Row& b) {
                if (numeric) return *detail::parse_real(a.order_key) < *detail::parse_real(b.order_key);
                return a.order_key < b.order_key;
            });
    }

    LoadedDataset out;
    out.rows = rows;
    double lower = spec.clip.lower;
    double upper = spec.clip.upper;
    std::size_t skip = 0;
    if (spec.clip.kind == ClipPolicy::Kind::calibration_prefix) {
        if (months.size() <= spec.clip.calibration_packs)
            throw DataError("calibration prefix of " + std::to_string(spec.clip.calibration_packs) +
                            " months leaves no data to predict");
        lower = kInf;
        upper = -kInf;
        std::size_t i = 0;
        for (const auto& [m, rs] : months) {
            if (i++ == spec.clip.calibration_packs) break;
            for (const auto& r : rs) {
                lower = std::min(lower, r.target);
                upper = std::max(upper, r.target);
                for (double e : r.experts) {
                    lower = std::min(lower, e);
                    upper = std::max(upper, e);
                }
            }
        }
        if (!(lower < upper)) throw DataError("calibration prefix has a degenerate range");
        skip = spec.clip.calibration_packs;
    }
    out.game = GameSpec::square(lower, upper);
    out.calibration_packs_dropped = skip;

    out.stream.experts = spec.expert_columns.size();
    std::size_t i = 0;
    for (const auto& [m, rs] : months) {
        if (i++ < skip) continue;
        Pack p;
        p.label = detail::month_label(m);
        p.predictions = Matrix(0, out.stream.experts);
        for (const auto& r : rs) {
            std::vector<double> clipped(r.experts.size());
            for (std::size_t n = 0; n < clipped.size(); ++n) clipped[n] = out.game.clip(r.experts[n]);
            p.predictions.append_row(clipped);
            p.outcomes.push_back(out.game.clip(r.target));
        }
        out.stream.packs.push_back(std::move(p));
    }
    return out;
}

inline LoadedDataset load_pack_csv(const DatasetSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + spec.path.string() + "'");
    try {
        return load_pack_csv(in, spec);
    } catch (const SchemaError&) {
        throw;
    } catch (const DataError& e) {
        throw e.in(spec.path.string());
    }
}

}  // namespace aapack
