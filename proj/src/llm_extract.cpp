#include "litfacet/llm_extract.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <thread>

#include "litfacet/error.hpp"

namespace litfacet {

using nlohmann::json;

const std::vector<PromptKind>& all_prompt_kinds() {
    static const std::vector<PromptKind> kinds = {PromptKind::context_factors, PromptKind::problems_solutions,
                                                  PromptKind::glossary, PromptKind::acronyms};
    return kinds;
}

std::string_view to_string(PromptKind kind) {
    switch (kind) {
    case PromptKind::context_factors: return "context_factors";
    case PromptKind::problems_solutions: return "problems_solutions";
    case PromptKind::glossary: return "glossary";
    case PromptKind::acronyms: return "acronyms";
    }
    return "unknown";
}

PromptKind parse_prompt_kind(std::string_view name) {
    for (auto k : all_prompt_kinds()) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw Error(ErrorCode::invalid_config, "unknown prompt kind '" + std::string(name) + "'");
}

std::string_view prompt_template(PromptKind kind) {
    switch (kind) {
    case PromptKind::context_factors:
        return "You are a helpful assistant that can read and analyze scientific papers. You are given the "
               "following paper: {Introduction}\n"
               "Answer the following three questions: (1) Why are the authors generating the summaries of "
               "the documents? (2) Who are they for? (3) How will they be used? You must not include the "
               "proposed approach by the authors for generating the summaries.\n"
               "You will output a list of the question-answer pairs where each question is prefixed by the "
               "token QUESTION: and each answer is prefixed by the ANSWER: token. Each pair is separated by "
               "two lines.";
    case PromptKind::problems_solutions:
        return "You are a helpful assistant that can read and analyze scientific papers. You are given the "
               "following paper: {Introduction}\n"
               "Can you give me a list of the main problems tackled by the authors and their proposed "
               "solutions? In this list, each problem is described followed by a solution proposed by the "
               "authors. Each problem starts with the token PROBLEM and each solution starts with the token "
               "SOLUTION.\n"
               "Here is the list:";
    case PromptKind::glossary:
        return "You are a scientist who can read and summarize scientific papers. You are given the following "
               "paper: {Introduction}. Your task is to extract a list of key concepts along with correct "
               "definitions like a glossary of the paper. Follow the format [Concept: Definition].";
    case PromptKind::acronyms:
        return "You are a scientist who can read and summarize scientific papers. You are given the following "
               "paper: {Introduction}. Your task is to extract a list of acronyms that the authors use along "
               "with correct expansions from the paper.\n"
               "For example (1) EDU: Elementary Discourse Unit, (2) SEHY: Simple Yet Effective Hybrid Model, "
               "(3) PLM: Pretrained Language Model. Exclude acronyms for which no expansion is explicitly "
               "provided by the authors. Follow the format [Acronym: Expansion].";
    }
    return {};
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::string_view ltrim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        pos = end + 1;
    }
    return lines;
}

/// Drops "1.", "1)", "(1)", "-" or "*" list markers in front of a line.
std::string_view strip_marker(std::string_view line) {
    line = ltrim(line);
    std::size_t i = 0;
    bool paren = !line.empty() && line[0] == '(';
    if (paren) {
        ++i;
    }
    std::size_t digits = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        ++i;
    }
    if (i > digits && i < line.size()) {
        if ((paren && line[i] == ')') || (!paren && (line[i] == '.' || line[i] == ')'))) {
            return ltrim(line.substr(i + 1));
        }
    }
    if (line.size() >= 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') {
        return ltrim(line.substr(2));
    }
    return line;
}

void append_line(std::string& field, std::string_view line) {
    field += '\n';
    field += line;
}

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::format_error, what); }

} // namespace

std::string build_prompt(PromptKind kind, std::string_view introduction) {
    if (blank(introduction)) {
        throw Error(ErrorCode::empty_introduction, "introduction is empty");
    }
    std::string text(prompt_template(kind));
    auto at = text.find(kIntroductionPlaceholder);
    text.replace(at, kIntroductionPlaceholder.size(), introduction);
    return text;
}

// ---------------------------------------------------------------------------
// Context factors

Parsed<QaPair> parse_context_factors(std::string_view raw) {
    enum class State { none, question, answer };
    Parsed<QaPair> out;
    State state = State::none;
    std::string question;
    std::string answer;
    std::size_t line_no = 0;

    auto finish = [&] {
        auto q = std::string(trim(question));
        auto a = std::string(trim(answer));
        if (q.empty() || a.empty()) {
            format_error("empty question or answer in pair " + std::to_string(out.items.size() + 1));
        }
        out.items.push_back({std::move(q), std::move(a)});
        question.clear();
        answer.clear();
    };

    constexpr std::string_view kQuestion = "QUESTION:";
    constexpr std::string_view kAnswer = "ANSWER:";
    for (auto line : split_lines(raw)) {
        ++line_no;
        auto s = strip_marker(line);
        if (s.starts_with(kQuestion)) {
            if (state == State::question) {
                format_error("QUESTION without ANSWER before line " + std::to_string(line_no));
            }
            if (state == State::answer) {
                finish();
            }
            question = std::string(s.substr(kQuestion.size()));
            state = State::question;
        } else if (s.starts_with(kAnswer)) {
            if (state != State::question) {
                format_error("ANSWER without preceding QUESTION at line " + std::to_string(line_no));
            }
            answer = std::string(s.substr(kAnswer.size()));
            state = State::answer;
        } else if (state == State::none) {
            if (!blank(line)) {
                out.warnings.push_back("ignored preamble line " + std::to_string(line_no));
            }
        } else {
            append_line(state == State::question ? question : answer, line);
        }
    }
    if (state == State::question) {
        format_error("trailing QUESTION without ANSWER");
    }
    if (state == State::answer) {
        finish();
    }
    if (out.items.size() != kContextQuestionCount) {
        throw Error(ErrorCode::wrong_pair_count, std::to_string(out.items.size()));
    }
    return out;
}

std::string render_context_factors(std::span<const QaPair> pairs) {
    std::string out;
    for (const auto& p : pairs) {
        if (!out.empty()) {
            out += "\n\n";
        }
        out += "QUESTION: " + p.question + "\nANSWER: " + p.answer;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Problems and solutions

namespace {

enum class PsToken { problem, solution };

struct TokenHit {
    std::size_t begin;  // token start
    std::size_t body;   // first character after the token and its separator
    PsToken token;
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::vector<TokenHit> find_ps_tokens(std::string_view s) {
    std::vector<TokenHit> hits;
    constexpr std::string_view kProblem = "PROBLEM";
    constexpr std::string_view kSolution = "SOLUTION";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && word_char(s[i - 1])) {
            continue;
        }
        PsToken token;
        std::size_t len;
        if (s.substr(i).starts_with(kProblem)) {
            token = PsToken::problem;
            len = kProblem.size();
        } else if (s.substr(i).starts_with(kSolution)) {
            token = PsToken::solution;
            len = kSolution.size();
        } else {
            continue;
        }
        std::size_t j = i + len;
        if (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) {
            continue;
        }
        // Optional ordinal such as "PROBLEM 2:".
        std::size_t k = j;
        while (k < s.size() && s[k] == ' ') {
            ++k;
        }
        std::size_t d = k;
        while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d]))) {
            ++d;
        }
        if (d > k && d < s.size() && (s[d] == ':' || s[d] == '.' || s[d] == ')')) {
            j = d;
        }
        if (j < s.size() && (s[j] == ':' || s[j] == '.' || s[j] == '-' || s[j] == ')')) {
            ++j;
        }
        while (j < s.size() && is_space(s[j])) {
            ++j;
        }
        hits.push_back({i, j, token});
        i = j > 0 ? j - 1 : j;
    }
    return hits;
}

} // namespace

Parsed<ProblemSolution> parse_problems_solutions(std::string_view raw) {
    enum class State { none, problem, solution };
    Parsed<ProblemSolution> out;
    State state = State::none;
    std::string problem;
    std::string solution;
    bool any_token = false;

    auto finish = [&] {
        auto p = std::string(trim(problem));
        auto s = std::string(trim(solution));
        if (p.empty() || s.empty()) {
            format_error("empty problem or solution in pair " + std::to_string(out.items.size() + 1));
        }
        out.items.push_back({std::move(p), std::move(s)});
        problem.clear();
        solution.clear();
    };
    auto current = [&]() -> std::string& { return state == State::problem ? problem : solution; };

    std::size_t line_no = 0;
    for (auto line : split_lines(raw)) {
        ++line_no;
        auto stripped = strip_marker(line);
        auto hits = find_ps_tokens(stripped);
        if (hits.empty()) {
            if (state == State::none) {
                if (!blank(line)) {
                    out.warnings.push_back("ignored preamble line " + std::to_string(line_no));
                }
            } else {
                append_line(current(), line);
            }
            continue;
        }
        any_token = true;
        auto lead = stripped.substr(0, hits.front().begin);
        if (!blank(lead)) {
            if (state == State::none) {
                out.warnings.push_back("ignored preamble text on line " + std::to_string(line_no));
            } else {
                append_line(current(), trim(lead));
            }
        }
        for (std::size_t h = 0; h < hits.size(); ++h) {
            auto end = h + 1 < hits.size() ? hits[h + 1].begin : stripped.size();
            auto body = stripped.substr(hits[h].body, end - hits[h].body);
            if (hits[h].token == PsToken::problem) {
                if (state == State::problem) {
                    format_error("PROBLEM without SOLUTION before line " + std::to_string(line_no));
                }
                if (state == State::solution) {
                    finish();
                }
                problem = std::string(body);
                state = State::problem;
            } else {
                if (state != State::problem) {
                    format_error("SOLUTION without preceding PROBLEM at line " + std::to_string(line_no));
                }
                solution = std::string(body);
                state = State::solution;
            }
        }
    }
    if (!any_token) {
        throw Error(ErrorCode::empty_list, "no PROBLEM/SOLUTION tokens found");
    }
    if (state == State::problem) {
        format_error("trailing PROBLEM without SOLUTION");
    }
    if (state == State::solution) {
        finish();
    }
    return out;
}

std::string render_problems_solutions(std::span<const ProblemSolution> pairs) {
    std::string out;
    for (const auto& p : pairs) {
        if (!out.empty()) {
            out += "\n";
        }
        out += "PROBLEM: " + p.problem + "\nSOLUTION: " + p.solution;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Glossary and acronyms

namespace {

std::string_view strip_emphasis(std::string_view s) {
    s = trim(s);
    while (s.size() >= 2 && s.front() == '*' && s.back() == '*') {
        s = trim(s.substr(1, s.size() - 2));
    }
    return s;
}

Parsed<TermEntry> parse_terms(std::string_view raw, TermKind kind) {
    Parsed<TermEntry> out;
    std::size_t line_no = 0;

    auto entry = [&](std::string_view text) {
        auto colon = text.find(':');
        if (colon == std::string_view::npos) {
            out.warnings.push_back("line " + std::to_string(line_no) + ": no colon, skipped");
            return;
        }
        auto term = strip_emphasis(text.substr(0, colon));
        auto definition = trim(text.substr(colon + 1));
        if (term.empty() || definition.empty()) {
            out.warnings.push_back("line " + std::to_string(line_no) + ": empty term or definition, skipped");
            return;
        }
        if (kind == TermKind::acronym && !looks_like_acronym(term)) {
            out.warnings.push_back("line " + std::to_string(line_no) + ": '" + std::string(term) +
                                   "' is not an acronym, dropped");
            return;
        }
        out.items.push_back({kind, std::string(term), std::string(definition)});
    };

    for (auto line : split_lines(raw)) {
        ++line_no;
        auto s = trim(strip_marker(line));
        if (s.empty()) {
            continue;
        }
        if (s.front() != '[') {
            entry(s);
            continue;
        }
        // One or more bracketed entries on the line.
        std::size_t pos = 0;
        while (pos < s.size()) {
            auto open = s.find('[', pos);
            if (open == std::string_view::npos) {
                if (!blank(s.substr(pos))) {
                    out.warnings.push_back("line " + std::to_string(line_no) + ": text outside brackets ignored");
                }
                break;
            }
            auto close = s.find(']', open + 1);
            auto body = close == std::string_view::npos ? s.substr(open + 1) : s.substr(open + 1, close - open - 1);
            entry(body);
            if (close == std::string_view::npos) {
                break;
            }
            pos = close + 1;
            // Tolerate separators such as "," between bracketed entries.
            while (pos < s.size() && (is_space(s[pos]) || s[pos] == ',' || s[pos] == ';')) {
                ++pos;
            }
        }
    }
    if (out.items.empty()) {
        if (out.warnings.empty()) {
            throw Error(ErrorCode::empty_list, "no entries");
        }
        format_error("no valid entries (" + out.warnings.front() + ")");
    }
    return out;
}

} // namespace

Parsed<TermEntry> parse_glossary(std::string_view raw) { return parse_terms(raw, TermKind::glossary); }

Parsed<TermEntry> parse_acronyms(std::string_view raw) { return parse_terms(raw, TermKind::acronym); }

std::string render_terms(std::span<const TermEntry> terms) {
    std::string out;
    for (const auto& t : terms) {
        out += "[" + t.term + ": " + t.definition + "]\n";
    }
    return out;
}

IndicativeSummary assemble_summary(std::span<const QaPair> qas, std::span<const ProblemSolution> ps) {
    IndicativeSummary s;
    if (qas.size() > 0) {
        s.purpose = qas[0].answer;
    }
    if (qas.size() > 1) {
        s.audience = qas[1].answer;
    }
    if (qas.size() > 2) {
        s.application = qas[2].answer;
    }
    s.problems_solutions.assign(ps.begin(), ps.end());
    return s;
}

// ---------------------------------------------------------------------------
// Extraction

ParsedExtraction parse_completion(PromptKind kind, std::string_view raw) {
    ParsedExtraction px;
    px.kind = kind;
    px.raw = std::string(raw);
    switch (kind) {
    case PromptKind::context_factors: {
        auto parsed = parse_context_factors(raw);
        px.qa_pairs = std::move(parsed.items);
        px.warnings = std::move(parsed.warnings);
        break;
    }
    case PromptKind::problems_solutions: {
        auto parsed = parse_problems_solutions(raw);
        px.problems_solutions = std::move(parsed.items);
        px.warnings = std::move(parsed.warnings);
        break;
    }
    case PromptKind::glossary:
    case PromptKind::acronyms: {
        auto parsed = kind == PromptKind::glossary ? parse_glossary(raw) : parse_acronyms(raw);
        px.terms = std::move(parsed.items);
        px.warnings = std::move(parsed.warnings);
        break;
    }
    }
    return px;
}

ParsedExtraction extract(PromptKind kind, const PaperRecord& record, const CompletionClientConfig& config,
                         CompletionTransport& transport) {
    config.validate();
    if (!record.introduction || blank(*record.introduction)) {
        throw Error(ErrorCode::missing_introduction, record.id);
    }
    CompletionRequest request{build_prompt(kind, *record.introduction), kind, record.id};
    std::string last_detail;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        auto raw = transport.complete(request);
        try {
            auto px = parse_completion(kind, raw);
            px.attempts = attempt + 1;
            return px;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::format_error && e.code() != ErrorCode::wrong_pair_count &&
                e.code() != ErrorCode::empty_list) {
                throw;
            }
            last_detail = e.what();
        }
    }
    throw Error(ErrorCode::parse_failed_after_retries, last_detail);
}

std::vector<ExtractionOutcome> extract_batch(std::span<const PaperRecord> records,
                                             std::span<const PromptKind> kinds,
                                             const CompletionClientConfig& config,
                                             CompletionTransport& transport) {
    config.validate();
    std::vector<ExtractionOutcome> outcomes(records.size() * kinds.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < outcomes.size(); i = next.fetch_add(1)) {
            const auto& record = records[i / kinds.size()];
            auto kind = kinds[i % kinds.size()];
            auto& out = outcomes[i];
            out.record_id = record.id;
            out.kind = kind;
            if (!record.introduction || blank(*record.introduction)) {
                out.skipped = true;
                continue;
            }
            try {
                out.result = extract(kind, record, config, transport);
            } catch (const Error& e) {
                out.error = e.what();
            }
        }
    };

    auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.max_in_flight), outcomes.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    return outcomes;
}

json to_json(const ParsedExtraction& px) {
    json out = {{"kind", to_string(px.kind)}, {"raw", px.raw}, {"warnings", px.warnings}, {"attempts", px.attempts}};
    if (px.qa_pairs) {
        json qa = json::array();
        for (const auto& p : *px.qa_pairs) {
            qa.push_back({{"question", p.question}, {"answer", p.answer}});
        }
        out["qa_pairs"] = qa;
    }
    if (px.problems_solutions) {
        json ps = json::array();
        for (const auto& p : *px.problems_solutions) {
            ps.push_back({{"problem", p.problem}, {"solution", p.solution}});
        }
        out["problems_solutions"] = ps;
    }
    if (px.terms) {
        json terms = json::array();
        for (const auto& t : *px.terms) {
            terms.push_back(to_json(t));
        }
        out["terms"] = terms;
    }
    return out;
}

} // namespace litfacet
