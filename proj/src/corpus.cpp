#include "emoxpt/corpus.hpp"

#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace emoxpt {

namespace {

using nlohmann::json;

constexpr std::string_view kRequiredFields[] = {"id", "date", "hashtags", "tweet", "response", "comments"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string row_label(std::size_t row) { return "row " + std::to_string(row); }

std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto number = [](std::string_view part, auto& out) {
        if (!std::all_of(part.begin(), part.end(), [](unsigned char c) { return std::isdigit(c); })) return false;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        return ec == std::errc{} && p == part.data() + part.size();
    };
    if (!number(s.substr(0, 4), y) || !number(s.substr(5, 2), m) || !number(s.substr(8, 2), d)) {
        return std::nullopt;
    }
    std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string normalize_hashtag(std::string_view raw, std::size_t row) {
    auto tag = trim(raw);
    while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
    std::string out;
    out.reserve(tag.size());
    for (unsigned char c : tag) {
        const char lower = static_cast<char>(std::tolower(c));
        const bool ok = (lower >= 'a' && lower <= 'z') || (lower >= '0' && lower <= '9') || lower == '_';
        if (!ok || c >= 0x80) {
            throw Error(ErrorCode::MalformedRecord,
                        row_label(row) + ": hashtag '" + std::string(raw) + "' has characters outside [a-z0-9_]");
        }
        out.push_back(lower);
    }
    return out;
}

struct RawRow {
    std::string id;
    std::string date;
    std::vector<std::string> hashtags;
    std::string tweet;
    std::string response;
    std::vector<std::string> comments;
};

Record build_record(RawRow raw, std::size_t row) {
    if (trim(raw.id).empty()) throw Error(ErrorCode::MissingField, row_label(row) + ": field 'id' is empty");
    auto date = parse_iso_date(trim(raw.date));
    if (!date) throw Error(ErrorCode::MalformedDate, row_label(row) + ": bad date '" + raw.date + "'");

    Record rec;
    rec.id = std::move(raw.id);
    rec.date = *date;
    for (const auto& h : raw.hashtags) {
        auto tag = normalize_hashtag(h, row);
        if (!tag.empty()) rec.hashtags.insert(std::move(tag));
    }
    rec.tweet_text = std::move(raw.tweet);
    rec.llm_response = std::move(raw.response);
    for (auto& c : raw.comments) {
        if (!trim(c).empty()) rec.comments.push_back(std::move(c));
    }
    return rec;
}

std::string json_string_field(const json& obj, std::string_view key, std::size_t row) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_string()) {
        throw Error(ErrorCode::MalformedRecord, row_label(row) + ": field '" + std::string(key) + "' must be a string");
    }
    return v.get<std::string>();
}

std::vector<std::string> json_string_list(const json& obj, std::string_view key, std::size_t row) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_array()) {
        throw Error(ErrorCode::MalformedRecord, row_label(row) + ": field '" + std::string(key) + "' must be an array");
    }
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string()) {
            throw Error(ErrorCode::MalformedRecord,
                        row_label(row) + ": field '" + std::string(key) + "' must hold strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::vector<RawRow> parse_jsonl(std::string_view text) {
    std::vector<RawRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::MalformedRecord, row_label(line_no) + ": " + e.what());
        }
        if (!obj.is_object()) throw Error(ErrorCode::MalformedRecord, row_label(line_no) + ": expected an object");
        for (auto field : kRequiredFields) {
            if (!obj.contains(std::string(field))) {
                throw Error(ErrorCode::MissingField, row_label(line_no) + ": missing field '" + std::string(field) + "'");
            }
        }
        rows.push_back(RawRow{json_string_field(obj, "id", line_no), json_string_field(obj, "date", line_no),
                              json_string_list(obj, "hashtags", line_no), json_string_field(obj, "tweet", line_no),
                              json_string_field(obj, "response", line_no),
                              json_string_list(obj, "comments", line_no)});
    }
    return rows;
}

std::vector<std::string> split_pipe(std::string_view cell) {
    std::vector<std::string> out;
    if (trim(cell).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        auto bar = cell.find('|', pos);
        out.emplace_back(cell.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos));
        if (bar == std::string_view::npos) break;
        pos = bar + 1;
    }
    return out;
}

std::vector<RawRow> parse_csv_rows(std::string_view text) {
    auto table = csv::parse(text);
    if (table.empty()) return {};
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < table[0].size(); ++i) column[std::string(trim(table[0][i]))] = i;
    for (auto field : kRequiredFields) {
        if (!column.contains(std::string(field))) {
            throw Error(ErrorCode::MissingField, "header: missing column '" + std::string(field) + "'");
        }
    }
    std::vector<RawRow> rows;
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& cells = table[r];
        auto cell = [&](std::string_view name) -> const std::string& {
            const auto idx = column.at(std::string(name));
            if (idx >= cells.size()) {
                throw Error(ErrorCode::MissingField, row_label(r) + ": missing field '" + std::string(name) + "'");
            }
            return cells[idx];
        };
        rows.push_back(RawRow{cell("id"), cell("date"), split_pipe(cell("hashtags")), cell("tweet"),
                              cell("response"), split_pipe(cell("comments"))});
    }
    return rows;
}

void require_nonempty(const Corpus& corpus) {
    if (corpus.records.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no records");
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "jsonl") return CorpusFormat::Jsonl;
    if (name == "csv") return CorpusFormat::Csv;
    throw Error(ErrorCode::InvalidArgument, "unknown corpus format '" + std::string(name) + "'");
}

Corpus parse_corpus(std::string_view text, CorpusFormat format, std::string source) {
    auto rows = format == CorpusFormat::Jsonl ? parse_jsonl(text) : parse_csv_rows(text);

    Corpus corpus;
    corpus.source_path = std::move(source);
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto rec = build_record(std::move(rows[i]), i + 1);
        if (!seen.insert(rec.id).second) throw Error(ErrorCode::DuplicateId, "duplicate id '" + rec.id + "'");
        corpus.records.push_back(std::move(rec));
    }
    require_nonempty(corpus);
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    return parse_corpus(read_text_file(path), format, path.string());
}

std::map<std::string, double> hashtag_distribution(const Corpus& corpus) {
    require_nonempty(corpus);
    std::map<std::string, std::size_t> counts;
    for (const auto& rec : corpus.records) {
        for (const auto& tag : rec.hashtags) ++counts[tag];
    }
    const auto total = static_cast<double>(corpus.records.size());
    std::map<std::string, double> out;
    for (const auto& [tag, n] : counts) out[tag] = 100.0 * static_cast<double>(n) / total;
    return out;
}

CommentStats comment_count_stats(const Corpus& corpus) {
    require_nonempty(corpus);
    CommentStats stats;
    stats.total_tweets = corpus.records.size();
    for (const auto& rec : corpus.records) {
        const auto n = rec.comments.size();
        stats.total_comments += n;
        ++stats.histogram[n];
        stats.max_comments = std::max(stats.max_comments, n);
    }
    stats.zero_comment_tweets = stats.histogram.contains(0) ? stats.histogram.at(0) : 0;
    const auto total = static_cast<double>(stats.total_tweets);
    stats.zero_comment_fraction = static_cast<double>(stats.zero_comment_tweets) / total;
    stats.mean_comments = static_cast<double>(stats.total_comments) / total;
    return stats;
}

std::string format_date(const std::chrono::year_month_day& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

}  // namespace emoxpt
