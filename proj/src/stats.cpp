#include "litfacet/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "litfacet/error.hpp"

namespace litfacet {

using nlohmann::json;

const std::vector<std::string>& stats_dimensions() {
    static const std::vector<std::string> dims = {"venue",        "year",           "paper_types", "learning_paradigms",
                                                  "domains",      "datasets",       "auto_metrics", "human_criteria",
                                                  "facet_tags",   "challenges"};
    return dims;
}

Dimension parse_stats_dimension(std::string_view name) {
    const auto& dims = stats_dimensions();
    if (std::find(dims.begin(), dims.end(), name) == dims.end()) {
        throw Error(ErrorCode::unknown_dimension, std::string(name));
    }
    return name == "year" ? Dimension::year_range : parse_dimension(name);
}

double rounded_percentage(std::size_t count, std::size_t total) {
    if (total == 0) {
        return 0.0;
    }
    // tenths = round_half_up(count * 1000 / total)
    auto tenths = (2 * count * 1000 + total) / (2 * total);
    return static_cast<double>(tenths) / 10.0;
}

std::size_t Distribution::count_of(std::string_view value) const {
    auto it = std::find_if(counts.begin(), counts.end(), [&](const ValueCount& vc) { return fold_case(vc.value) == fold_case(value); });
    return it == counts.end() ? 0 : it->count;
}

double Distribution::percentage(std::string_view value) const {
    return rounded_percentage(count_of(value), total_papers);
}

std::size_t Distribution::sum() const {
    std::size_t s = 0;
    for (const auto& vc : counts) {
        s += vc.count;
    }
    return s;
}

namespace {

/// Counts values with case-folded grouping; the display spelling is the
/// first one met in id order.
class Counter {
public:
    void add(const std::string& value) {
        auto key = fold_case(value);
        auto [it, fresh] = counts_.try_emplace(key, ValueCount{value, 0});
        ++it->second.count;
    }

    std::vector<ValueCount> sorted() const {
        std::vector<ValueCount> out;
        for (const auto& [key, vc] : counts_) {
            out.push_back(vc);
        }
        std::sort(out.begin(), out.end(), [](const ValueCount& a, const ValueCount& b) {
            if (a.count != b.count) {
                return a.count > b.count;
            }
            return a.value < b.value;
        });
        return out;
    }

private:
    std::map<std::string, ValueCount> counts_;
};

Distribution distribution_over(const CorpusSnapshot& snapshot, Dimension dim, std::string name,
                               bool (*keep)(const PaperRecord&)) {
    Distribution d;
    d.dimension = std::move(name);
    d.multi_label = !(dim == Dimension::venue || dim == Dimension::year_range);
    Counter counter;
    for (const auto& [id, record] : snapshot.records) {
        if (keep && !keep(record)) {
            continue;
        }
        ++d.total_papers;
        std::set<std::string> seen;
        for (const auto& v : record_values(record, dim)) {
            // Two spellings of one value in a record count once.
            if (seen.insert(fold_case(v)).second) {
                counter.add(v);
            }
        }
    }
    d.counts = counter.sorted();
    return d;
}

} // namespace

Distribution distribution(const CorpusSnapshot& snapshot, std::string_view dimension) {
    auto dim = parse_stats_dimension(dimension);
    return distribution_over(snapshot, dim, std::string(dimension), nullptr);
}

std::string_view to_string(YearlyMetric metric) { return metric == YearlyMetric::papers ? "papers" : "with_code"; }

YearlySeries yearly(const CorpusSnapshot& snapshot, YearlyMetric metric) {
    YearlySeries s;
    s.metric = metric;
    for (const auto& [id, record] : snapshot.records) {
        auto& point = s.points[record.year];
        if (metric == YearlyMetric::papers || record.has_code) {
            ++point;
        }
    }
    return s;
}

Distribution component_distribution(const CorpusSnapshot& snapshot) {
    Distribution d;
    d.dimension = "components";
    d.total_papers = snapshot.size();
    std::map<FacetGroup, std::size_t> counts;
    for (const auto& [id, record] : snapshot.records) {
        std::set<FacetGroup> hit;
        for (const auto& tag : record.facet_tags) {
            if (const auto* f = find_facet(tag)) {
                hit.insert(f->group);
            }
        }
        if (!record.domains.empty() || !record.datasets.empty() || !record.auto_metrics.empty() ||
            !record.human_criteria.empty()) {
            hit.insert(FacetGroup::evaluation);
        }
        for (auto g : hit) {
            ++counts[g];
        }
    }
    std::vector<ValueCount> out;
    for (auto g : {FacetGroup::document_representation, FacetGroup::model_training, FacetGroup::summary_generation,
                   FacetGroup::evaluation}) {
        if (counts[g] > 0) {
            out.push_back({std::string(to_string(g)), counts[g]});
        }
    }
    std::sort(out.begin(), out.end(), [](const ValueCount& a, const ValueCount& b) {
        return a.count != b.count ? a.count > b.count : a.value < b.value;
    });
    d.counts = std::move(out);
    return d;
}

DashboardReport report(const CorpusSnapshot& snapshot) {
    DashboardReport r;
    r.total_papers = snapshot.size();
    r.papers_per_year = yearly(snapshot, YearlyMetric::papers);
    r.code_per_year = yearly(snapshot, YearlyMetric::with_code);
    r.datasets = distribution(snapshot, "datasets");
    r.domains = distribution(snapshot, "domains");
    r.human_criteria = distribution(snapshot, "human_criteria");
    r.components = component_distribution(snapshot);
    r.challenges = distribution(snapshot, "challenges");
    r.learning_paradigms_all = distribution(snapshot, "learning_paradigms");
    r.learning_paradigms_method =
        distribution_over(snapshot, Dimension::learning_paradigms, "learning_paradigms",
                          [](const PaperRecord& p) { return p.paper_types.contains("method"); });
    return r;
}

// ---------------------------------------------------------------------------
// Output

json to_json(const Distribution& d) {
    json values = json::array();
    for (const auto& vc : d.counts) {
        values.push_back(
            {{"value", vc.value}, {"count", vc.count}, {"percentage", rounded_percentage(vc.count, d.total_papers)}});
    }
    return {{"dimension", d.dimension},
            {"total_papers", d.total_papers},
            {"multi_label", d.multi_label},
            {"values", values}};
}

json to_json(const YearlySeries& s) {
    json points = json::object();
    for (const auto& [year, count] : s.points) {
        points[std::to_string(year)] = count;
    }
    return {{"metric", to_string(s.metric)}, {"points", points}};
}

json to_json(const DashboardReport& r) {
    return {{"total_papers", r.total_papers},
            {"papers_per_year", to_json(r.papers_per_year)},
            {"code_per_year", to_json(r.code_per_year)},
            {"datasets", to_json(r.datasets)},
            {"domains", to_json(r.domains)},
            {"human_criteria", to_json(r.human_criteria)},
            {"components", to_json(r.components)},
            {"challenges", to_json(r.challenges)},
            {"learning_paradigms",
             {{"all_papers", to_json(r.learning_paradigms_all)},
              {"method_papers", to_json(r.learning_paradigms_method)}}}};
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string format_pct(double pct) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", pct);
    return buf;
}

void csv_rows(std::ostringstream& out, const std::string& section, const Distribution& d) {
    for (const auto& vc : d.counts) {
        if (!section.empty()) {
            out << csv_field(section) << ',';
        }
        out << csv_field(vc.value) << ',' << vc.count << ',' << format_pct(rounded_percentage(vc.count, d.total_papers))
            << '\n';
    }
}

void yearly_rows(std::ostringstream& out, const std::string& section, const YearlySeries& s, std::size_t total) {
    for (const auto& [year, count] : s.points) {
        out << section << ',' << year << ',' << count << ',' << format_pct(rounded_percentage(count, total)) << '\n';
    }
}

void table_block(std::ostringstream& out, const std::string& title, const std::vector<ValueCount>& rows,
                 std::size_t total) {
    std::size_t width = 5;
    for (const auto& vc : rows) {
        width = std::max(width, vc.value.size());
    }
    out << title << " (" << total << " papers)\n";
    char line[64];
    out << "  " << std::string("value") << std::string(width - 5, ' ') << "   count       %\n";
    for (const auto& vc : rows) {
        std::snprintf(line, sizeof line, "%8zu  %6s", vc.count, format_pct(rounded_percentage(vc.count, total)).c_str());
        out << "  " << vc.value << std::string(width - vc.value.size(), ' ') << line << '\n';
    }
}

std::vector<ValueCount> series_rows(const YearlySeries& s) {
    std::vector<ValueCount> rows;
    for (const auto& [year, count] : s.points) {
        rows.push_back({std::to_string(year), count});
    }
    return rows;
}

} // namespace

std::string to_csv(const Distribution& d) {
    std::ostringstream out;
    out << "value,count,percentage\n";
    csv_rows(out, "", d);
    return out.str();
}

std::string to_csv(const DashboardReport& r) {
    std::ostringstream out;
    out << "section,value,count,percentage\n";
    yearly_rows(out, "papers_per_year", r.papers_per_year, r.total_papers);
    yearly_rows(out, "code_per_year", r.code_per_year, r.total_papers);
    csv_rows(out, "datasets", r.datasets);
    csv_rows(out, "domains", r.domains);
    csv_rows(out, "human_criteria", r.human_criteria);
    csv_rows(out, "components", r.components);
    csv_rows(out, "challenges", r.challenges);
    csv_rows(out, "learning_paradigms_all", r.learning_paradigms_all);
    csv_rows(out, "learning_paradigms_method", r.learning_paradigms_method);
    return out.str();
}

std::string to_table(const Distribution& d) {
    std::ostringstream out;
    table_block(out, d.dimension, d.counts, d.total_papers);
    return out.str();
}

std::string to_table(const DashboardReport& r) {
    std::ostringstream out;
    table_block(out, "papers per year", series_rows(r.papers_per_year), r.total_papers);
    table_block(out, "papers with code per year", series_rows(r.code_per_year), r.total_papers);
    table_block(out, "datasets", r.datasets.counts, r.datasets.total_papers);
    table_block(out, "domains", r.domains.counts, r.domains.total_papers);
    table_block(out, "human evaluation criteria", r.human_criteria.counts, r.human_criteria.total_papers);
    table_block(out, "annotation components", r.components.counts, r.components.total_papers);
    table_block(out, "challenges", r.challenges.counts, r.challenges.total_papers);
    table_block(out, "learning paradigms (all papers)", r.learning_paradigms_all.counts,
                r.learning_paradigms_all.total_papers);
    table_block(out, "learning paradigms (method papers)", r.learning_paradigms_method.counts,
                r.learning_paradigms_method.total_papers);
    return out.str();
}

} // namespace litfacet
