#include <algorithm>

#include "litfacet/error.hpp"
#include "litfacet/service.hpp"

namespace litfacet {

PaperRecord apply_extraction(PaperRecord record, const ParsedExtraction& extraction) {
    auto& summary = record.indicative_summary;
    switch (extraction.kind) {
    case PromptKind::context_factors: {
        if (!extraction.qa_pairs) {
            break;
        }
        if (!summary) {
            summary.emplace();
        }
        auto fresh = assemble_summary(*extraction.qa_pairs, {});
        summary->purpose = fresh.purpose;
        summary->audience = fresh.audience;
        summary->application = fresh.application;
        break;
    }
    case PromptKind::problems_solutions:
        if (!extraction.problems_solutions) {
            break;
        }
        if (!summary) {
            summary.emplace();
        }
        summary->problems_solutions = *extraction.problems_solutions;
        break;
    case PromptKind::glossary:
    case PromptKind::acronyms: {
        if (!extraction.terms) {
            break;
        }
        auto kind = extraction.kind == PromptKind::glossary ? TermKind::glossary : TermKind::acronym;
        std::erase_if(record.terminology, [kind](const TermEntry& t) { return t.kind == kind; });
        for (auto t : *extraction.terms) {
            t.kind = kind;
            record.terminology.push_back(std::move(t));
        }
        break;
    }
    }
    return record;
}

EnrichmentResult enrich_corpus(const CorpusSnapshot& snapshot, std::span<const PromptKind> kinds,
                               const CompletionClientConfig& config, CompletionTransport& transport) {
    std::vector<PaperRecord> records;
    records.reserve(snapshot.size());
    for (const auto& [id, r] : snapshot.records) {
        records.push_back(r);
    }
    auto outcomes = extract_batch(records, kinds, config, transport);

    EnrichmentResult result;
    std::map<std::string, PaperRecord> updated = snapshot.records;
    for (const auto& o : outcomes) {
        if (o.skipped) {
            ++result.skipped;
            continue;
        }
        if (o.error) {
            result.errors.push_back(o.record_id + " " + std::string(to_string(o.kind)) + ": " + *o.error);
            continue;
        }
        auto& record = updated.at(o.record_id);
        auto candidate = apply_extraction(record, *o.result);
        if (auto violations = validate_record(candidate); !violations.empty()) {
            // e.g. a problem/solution pair that parsed but fails a record rule
            result.errors.push_back(o.record_id + " " + std::string(to_string(o.kind)) + ": " +
                                    violations.front().field + " " + violations.front().rule);
            continue;
        }
        record = std::move(candidate);
        ++result.applied;
    }
    result.snapshot = snapshot;
    result.snapshot.records = std::move(updated);
    return result;
}

CorpusSnapshot attach_challenges(const CorpusSnapshot& snapshot, const ChallengeClusterSet& clusters) {
    CorpusSnapshot out = snapshot;
    for (const auto& a : clusters.assignments) {
        if (a.label < 0) {
            continue;
        }
        auto it = out.records.find(a.paper_id);
        auto name = clusters.labels.find(a.label);
        if (it == out.records.end() || name == clusters.labels.end()) {
            continue;
        }
        it->second.challenges.insert(name->second);
    }
    return out;
}

} // namespace litfacet
