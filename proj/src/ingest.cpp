#include "litfacet/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "litfacet/error.hpp"

namespace litfacet {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::io_error, "failed reading " + path.string());
    }
    return buf.str();
}

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        ++line_no;
        fn(line_no, line);
        pos = end + 1;
    }
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string describe(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) {
            out += "; ";
        }
        out += v.field + ": " + v.rule;
        if (!v.detail.empty()) {
            out += " (" + v.detail + ")";
        }
    }
    return out;
}

json parse_json_line(std::string_view line, std::size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse_error, e.what(), line_no);
    }
}

} // namespace

const PaperRecord* CorpusSnapshot::find(const std::string& id) const {
    auto it = records.find(id);
    return it == records.end() ? nullptr : &it->second;
}

CorpusSnapshot make_snapshot(std::vector<PaperRecord> records, std::string source) {
    CorpusSnapshot snap;
    snap.source_path = std::move(source);
    snap.loaded_at = std::chrono::system_clock::now();
    for (auto& r : records) {
        auto violations = validate_record(r);
        if (!violations.empty()) {
            throw Error(ErrorCode::validation_error, "record '" + r.id + "': " + describe(violations));
        }
        auto id = r.id;
        if (!snap.records.emplace(id, std::move(r)).second) {
            throw Error(ErrorCode::duplicate_id, id);
        }
    }
    return snap;
}

LoadResult parse_corpus(std::string_view text, std::string source, const LoadOptions& options) {
    LoadResult result;
    result.snapshot.source_path = std::move(source);
    result.snapshot.loaded_at = std::chrono::system_clock::now();

    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (is_blank(line)) {
            return;
        }
        try {
            auto record = record_from_json(parse_json_line(line, line_no));
            auto violations = validate_record(record);
            if (!violations.empty()) {
                if (!options.lenient) {
                    throw Error(ErrorCode::validation_error,
                                "record '" + record.id + "': " + describe(violations), line_no);
                }
                result.rejected.push_back(
                    {line_no, ErrorCode::validation_error, describe(violations), violations});
                return;
            }
            if (result.snapshot.records.contains(record.id)) {
                throw Error(ErrorCode::duplicate_id, record.id, line_no);
            }
            for (auto& w : record_warnings(record)) {
                result.warnings.push_back(std::move(w));
            }
            auto id = record.id;
            result.snapshot.records.emplace(std::move(id), std::move(record));
        } catch (const Error& e) {
            if (!options.lenient) {
                if (e.line()) {
                    throw;
                }
                throw Error(e.code(), e.detail(), line_no);
            }
            result.rejected.push_back({line_no, e.code(), e.detail(), {}});
        }
    });
    return result;
}

LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    return parse_corpus(read_text_file(path), path.string(), options);
}

std::string format_corpus(const CorpusSnapshot& snapshot) {
    std::string out;
    for (const auto& [id, record] : snapshot.records) {
        out += to_json(record).dump();
        out += '\n';
    }
    return out;
}

void write_corpus(const std::filesystem::path& path, const CorpusSnapshot& snapshot) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot write " + path.string());
    }
    out << format_corpus(snapshot);
    if (!out) {
        throw Error(ErrorCode::io_error, "failed writing " + path.string());
    }
}

// ---------------------------------------------------------------------------
// Screening

std::vector<std::string> keyword_screen(std::span<const ScreenCandidate> candidates,
                                        std::string_view keyword) {
    if (keyword.empty()) {
        throw Error(ErrorCode::empty_keyword, "keyword must not be empty");
    }
    const auto needle = fold_case(keyword);
    std::vector<std::string> out;
    for (const auto& c : candidates) {
        if (fold_case(c.title).find(needle) != std::string::npos ||
            fold_case(c.abstract).find(needle) != std::string::npos) {
            out.push_back(c.id);
        }
    }
    return out;
}

std::vector<ScreenCandidate> load_candidates(const std::filesystem::path& path) {
    std::vector<ScreenCandidate> out;
    for_each_line(read_text_file(path), [&](std::size_t line_no, std::string_view line) {
        if (is_blank(line)) {
            return;
        }
        auto j = parse_json_line(line, line_no);
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
            throw Error(ErrorCode::parse_error, "candidate needs a string 'id'", line_no);
        }
        ScreenCandidate c;
        c.id = j["id"].get<std::string>();
        c.title = j.value("title", "");
        c.abstract = j.value("abstract", "");
        out.push_back(std::move(c));
    });
    return out;
}

// ---------------------------------------------------------------------------
// Figures

std::string_view to_string(AssetKind kind) { return kind == AssetKind::figure ? "figure" : "table"; }

json to_json(const FigureAsset& a) {
    return {{"paper_id", a.paper_id},
            {"kind", to_string(a.kind)},
            {"caption", a.caption},
            {"image_ref", a.image_ref},
            {"ordinal", a.ordinal}};
}

namespace {

bool escapes_base(const std::filesystem::path& rel) {
    int depth = 0;
    for (const auto& part : rel.lexically_normal()) {
        if (part == "..") {
            if (--depth < 0) {
                return true;
            }
        } else if (part != "." && !part.empty()) {
            ++depth;
        }
    }
    return false;
}

FigureAsset figure_from_json(const json& j, std::size_t index) {
    auto where = "asset #" + std::to_string(index);
    if (!j.is_object()) {
        throw Error(ErrorCode::parse_error, where + " is not an object");
    }
    auto str = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            throw Error(ErrorCode::parse_error, where + ": '" + key + "' must be a string");
        }
        return it->get<std::string>();
    };
    FigureAsset a;
    a.paper_id = str("paper_id");
    auto kind = str("kind");
    if (kind == "figure") {
        a.kind = AssetKind::figure;
    } else if (kind == "table") {
        a.kind = AssetKind::table;
    } else {
        throw Error(ErrorCode::parse_error, where + ": kind must be figure or table");
    }
    a.caption = str("caption");
    a.image_ref = str("image_ref");
    auto it = j.find("ordinal");
    if (it == j.end() || !it->is_number_integer()) {
        throw Error(ErrorCode::parse_error, where + ": 'ordinal' must be an integer");
    }
    a.ordinal = it->get<int>();
    if (a.paper_id.empty()) {
        throw Error(ErrorCode::parse_error, where + ": empty paper_id");
    }
    if (a.ordinal < 1) {
        throw Error(ErrorCode::parse_error, where + ": ordinal must be >= 1");
    }
    std::filesystem::path ref(a.image_ref);
    if (a.image_ref.empty() || ref.is_absolute() || escapes_base(ref)) {
        throw Error(ErrorCode::parse_error, where + ": image_ref must be a relative path inside the manifest directory");
    }
    return a;
}

} // namespace

std::vector<FigureAsset> parse_figures(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse_error, e.what());
    }
    if (!doc.is_array()) {
        throw Error(ErrorCode::parse_error, "figure manifest must be a JSON array");
    }
    std::vector<FigureAsset> out;
    std::set<std::tuple<std::string, AssetKind, int>> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        auto asset = figure_from_json(doc[i], i);
        if (!seen.emplace(asset.paper_id, asset.kind, asset.ordinal).second) {
            throw Error(ErrorCode::parse_error, "duplicate ordinal " + std::to_string(asset.ordinal) +
                                                    " for " + std::string(to_string(asset.kind)) +
                                                    " of paper " + asset.paper_id);
        }
        out.push_back(std::move(asset));
    }
    return out;
}

std::vector<FigureAsset> load_figures(const std::filesystem::path& path) {
    return parse_figures(read_text_file(path));
}

std::vector<std::string> cross_validate_figures(std::span<const FigureAsset> figures,
                                                const CorpusSnapshot& snapshot) {
    std::vector<std::string> out;
    for (const auto& f : figures) {
        if (!snapshot.find(f.paper_id)) {
            out.push_back(std::string(to_string(f.kind)) + " " + std::to_string(f.ordinal) +
                          " references unknown paper '" + f.paper_id + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Embeddings

const EmbeddedStatement* EmbeddingSet::find(const std::string& statement_id) const {
    auto it = std::find_if(statements.begin(), statements.end(),
                           [&](const EmbeddedStatement& s) { return s.statement_id == statement_id; });
    return it == statements.end() ? nullptr : &*it;
}

EmbeddingSet parse_embeddings(std::string_view text) {
    EmbeddingSet set;
    std::set<std::string> ids;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (is_blank(line)) {
            return;
        }
        auto j = parse_json_line(line, line_no);
        auto str = [&](const char* key) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_string()) {
                throw Error(ErrorCode::parse_error, std::string("'") + key + "' must be a string", line_no);
            }
            return it->get<std::string>();
        };
        if (!j.is_object()) {
            throw Error(ErrorCode::parse_error, "expected an object", line_no);
        }
        EmbeddedStatement s;
        s.statement_id = str("statement_id");
        s.paper_id = str("paper_id");
        s.problem = str("problem");
        auto it = j.find("vector");
        if (it == j.end() || !it->is_array()) {
            throw Error(ErrorCode::parse_error, "'vector' must be an array", line_no);
        }
        s.vector.reserve(it->size());
        for (const auto& v : *it) {
            if (!v.is_number()) {
                throw Error(ErrorCode::parse_error, "'vector' must hold numbers", line_no);
            }
            s.vector.push_back(v.get<double>());
        }
        if (s.statement_id.empty() || !ids.insert(s.statement_id).second) {
            throw Error(ErrorCode::parse_error, "empty or duplicate statement_id '" + s.statement_id + "'",
                        line_no);
        }
        if (set.statements.empty()) {
            if (s.vector.size() < 2) {
                throw Error(ErrorCode::parse_error, "vectors need at least 2 dimensions", line_no);
            }
            set.dim = s.vector.size();
        } else if (s.vector.size() != set.dim) {
            throw Error(ErrorCode::dim_mismatch, s.statement_id, line_no);
        }
        set.statements.push_back(std::move(s));
    });
    return set;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
    return parse_embeddings(read_text_file(path));
}

std::string format_embeddings(const EmbeddingSet& set) {
    std::string out;
    for (const auto& s : set.statements) {
        json j = {{"statement_id", s.statement_id},
                  {"paper_id", s.paper_id},
                  {"problem", s.problem},
                  {"vector", s.vector}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

} // namespace litfacet
