#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "litfacet/ingest.hpp"
#include "litfacet/search.hpp"

namespace litfacet {

/// Dimensions accepted by distribution(): venue, year, paper_types,
/// learning_paradigms, domains, datasets, auto_metrics, human_criteria,
/// facet_tags, challenges.
const std::vector<std::string>& stats_dimensions();
/// Throws Error(unknown_dimension).
Dimension parse_stats_dimension(std::string_view name);

struct ValueCount {
    std::string value;
    std::size_t count = 0;
    bool operator==(const ValueCount&) const = default;
};

/// Percentage of total_papers rounded half-up to one decimal, computed in
/// integer arithmetic. 0 when total is 0.
double rounded_percentage(std::size_t count, std::size_t total);

/// Value counts over a snapshot. Percentages are taken against the number of
/// papers, so multi-label dimensions can add up to more than 100%.
struct Distribution {
    std::string dimension;
    /// Ordered by count descending, then value ascending.
    std::vector<ValueCount> counts;
    std::size_t total_papers = 0;
    bool multi_label = true;

    /// Case-insensitive lookup.
    std::size_t count_of(std::string_view value) const;
    double percentage(std::string_view value) const;
    std::size_t sum() const;
    bool operator==(const Distribution&) const = default;
};

Distribution distribution(const CorpusSnapshot& snapshot, std::string_view dimension);

enum class YearlyMetric { papers, with_code };
std::string_view to_string(YearlyMetric metric);

struct YearlySeries {
    YearlyMetric metric = YearlyMetric::papers;
    std::map<int, std::size_t> points;
    bool operator==(const YearlySeries&) const = default;
};

/// One point per year present in the snapshot.
YearlySeries yearly(const CorpusSnapshot& snapshot, YearlyMetric metric);

/// Papers per annotation-scheme component. A paper counts once for a
/// component when it carries at least one of that component's facets.
Distribution component_distribution(const CorpusSnapshot& snapshot);

struct DashboardReport {
    std::size_t total_papers = 0;
    YearlySeries papers_per_year;
    YearlySeries code_per_year;
    Distribution datasets;
    Distribution domains;
    Distribution human_criteria;
    Distribution components;
    Distribution challenges;
    /// Paradigm shares over all papers and over method papers only.
    Distribution learning_paradigms_all;
    Distribution learning_paradigms_method;

    bool operator==(const DashboardReport&) const = default;
};

DashboardReport report(const CorpusSnapshot& snapshot);

nlohmann::json to_json(const Distribution& d);
nlohmann::json to_json(const YearlySeries& s);
nlohmann::json to_json(const DashboardReport& r);

std::string to_csv(const Distribution& d);
std::string to_csv(const DashboardReport& r);
std::string to_table(const Distribution& d);
std::string to_table(const DashboardReport& r);

} // namespace litfacet
