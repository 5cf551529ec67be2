#include "crm/error.hpp"
#include "crm/text.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace crm::text {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool is_quoted(std::string_view token) {
    return token.size() >= 3 && token.front() == '"' && token.back() == '"';
}

} // namespace

Pcfg Pcfg::parse(std::string_view text) {
    Pcfg g;
    std::size_t line_start = 0;
    std::map<std::string, std::size_t> first_seen;
    std::vector<std::pair<std::string, std::size_t>> rhs_refs;
    while (line_start <= text.size()) {
        auto line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        std::string_view line = text.substr(line_start, line_end - line_start);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        const std::size_t at = line_start;
        line_start = line_end + 1;
        if (line.empty()) continue;

        if (line.starts_with("start ") || line.starts_with("start\t")) {
            const auto tokens = split_ws(line);
            if (tokens.size() != 2) throw ParseError("start line needs exactly one symbol", at);
            g.start_ = std::string(tokens[1]);
            continue;
        }
        const auto arrow = line.find("->");
        const auto prob_at = line.rfind('@');
        if (arrow == std::string_view::npos || prob_at == std::string_view::npos || prob_at < arrow)
            throw ParseError("expected 'LHS -> RHS... @ prob'", at);
        const auto lhs_tokens = split_ws(line.substr(0, arrow));
        if (lhs_tokens.size() != 1 || is_quoted(lhs_tokens[0]))
            throw ParseError("rule needs exactly one nonterminal on the left", at);
        const auto rhs_tokens = split_ws(line.substr(arrow + 2, prob_at - arrow - 2));
        if (rhs_tokens.empty()) throw ParseError("empty right-hand side", at);

        const auto prob_text = trim(line.substr(prob_at + 1));
        double prob = 0.0;
        const auto [ptr, ec] = std::from_chars(prob_text.data(), prob_text.data() + prob_text.size(), prob);
        if (ec != std::errc() || ptr != prob_text.data() + prob_text.size() || !(prob > 0.0) || prob > 1.0)
            throw ParseError("rule probability must be a number in (0, 1]", at + (prob_text.data() - line.data()));

        Rule rule;
        rule.lhs = std::string(lhs_tokens[0]);
        rule.probability = prob;
        if (rhs_tokens.size() == 1 && is_quoted(rhs_tokens[0])) {
            rule.lexical = true;
            rule.rhs.emplace_back(rhs_tokens[0].substr(1, rhs_tokens[0].size() - 2));
        } else {
            for (auto t : rhs_tokens) {
                if (t.front() == '"') throw ParseError("words may only appear alone on a right-hand side", at);
                rule.rhs.emplace_back(t);
                rhs_refs.emplace_back(std::string(t), at);
            }
        }
        first_seen.emplace(rule.lhs, at);
        g.rules_[rule.lhs].push_back(std::move(rule));
    }

    if (g.rules_.empty()) throw ParseError("grammar has no rules", 0);
    if (g.start_.empty()) g.start_ = g.rules_.begin()->first;
    if (!g.rules_.contains(g.start_)) throw ParseError("start symbol '" + g.start_ + "' has no rules", 0);
    for (const auto& [symbol, at] : rhs_refs)
        if (!g.rules_.contains(symbol)) throw ParseError("symbol '" + symbol + "' has no rules", at);

    for (const auto& [lhs, rules] : g.rules_) {
        double sum = 0.0;
        std::vector<double> probs;
        for (const auto& r : rules) {
            sum += r.probability;
            probs.push_back(r.probability);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ParseError("rule probabilities of '" + lhs + "' sum to " + std::to_string(sum),
                             first_seen.at(lhs));
        g.tables_.emplace(lhs, coding::CumulativeTable::quantize(coding::SymbolDistribution(probs)));
    }

    // Every nonterminal must be able to finish: least fixpoint of productive symbols.
    std::set<std::string> productive;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [lhs, rules] : g.rules_) {
            if (productive.contains(lhs)) continue;
            for (const auto& r : rules) {
                bool ok = r.lexical;
                if (!ok) {
                    ok = true;
                    for (const auto& s : r.rhs) ok = ok && productive.contains(s);
                }
                if (ok) {
                    productive.insert(lhs);
                    changed = true;
                    break;
                }
            }
        }
    }
    for (const auto& [lhs, rules] : g.rules_)
        if (!productive.contains(lhs))
            throw DomainError("nonterminal '" + lhs + "' cannot derive a finite sentence");
    return g;
}

const std::vector<Rule>& Pcfg::rules_for(const std::string& nonterminal) const {
    const auto it = rules_.find(nonterminal);
    if (it == rules_.end()) throw DomainError("'" + nonterminal + "' is not a nonterminal");
    return it->second;
}

const coding::CumulativeTable& Pcfg::table_for(const std::string& nonterminal) const {
    const auto it = tables_.find(nonterminal);
    if (it == tables_.end()) throw DomainError("'" + nonterminal + "' is not a nonterminal");
    return it->second;
}

std::vector<std::string> Pcfg::nonterminals() const {
    std::vector<std::string> out;
    for (const auto& [lhs, rules] : rules_) out.push_back(lhs);
    return out;
}

namespace {

struct Replay {
    std::vector<std::string> words;
    bool complete = false;
};

// Walks the steps against a leftmost expansion stack.
Replay replay(const Pcfg& grammar, const ParseDerivation& derivation) {
    Replay out;
    std::vector<std::string> pending{grammar.start()};
    for (std::size_t i = 0; i < derivation.steps.size(); ++i) {
        const auto& step = derivation.steps[i];
        if (pending.empty())
            throw DomainError("step " + std::to_string(i) + " follows a completed derivation");
        const std::string expected = pending.back();
        pending.pop_back();
        if (step.lhs != expected)
            throw DomainError("step " + std::to_string(i) + " expands '" + step.lhs + "' but '" + expected +
                              "' is next");
        const auto& rules = grammar.rules_for(step.lhs);
        if (step.rule >= rules.size())
            throw DomainError("step " + std::to_string(i) + " uses rule " + std::to_string(step.rule) + " of '" +
                              step.lhs + "', which has " + std::to_string(rules.size()));
        const auto& rule = rules[step.rule];
        if (rule.lexical) {
            out.words.push_back(rule.rhs.front());
        } else {
            for (auto it = rule.rhs.rbegin(); it != rule.rhs.rend(); ++it) pending.push_back(*it);
        }
    }
    out.complete = pending.empty();
    return out;
}

} // namespace

std::vector<std::string> derive_words(const Pcfg& grammar, const ParseDerivation& derivation) {
    auto r = replay(grammar, derivation);
    if (!r.complete) throw DomainError("derivation ends with unexpanded nonterminals");
    return r.words;
}

double pcfg_derivation_cost(const Pcfg& grammar, const ParseDerivation& derivation, bool include_lexicon) {
    (void)replay(grammar, derivation);
    double bits = 0.0;
    for (const auto& step : derivation.steps) {
        const auto& rules = grammar.rules_for(step.lhs);
        const auto& rule = rules[step.rule];
        if (rule.lexical && !include_lexicon) continue;
        bits -= std::log2(rule.probability);
    }
    return bits == 0.0 ? 0.0 : bits;
}

coding::BitString pcfg_encode(const Pcfg& grammar, const ParseDerivation& derivation) {
    (void)derive_words(grammar, derivation);
    coding::ArithmeticEncoder encoder;
    for (const auto& step : derivation.steps)
        if (grammar.rules_for(step.lhs).size() > 1) encoder.encode(grammar.table_for(step.lhs), step.rule);
    return encoder.finish();
}

ParseDerivation pcfg_decode(const Pcfg& grammar, coding::BitSource& bits) {
    coding::ArithmeticDecoder decoder(bits);
    ParseDerivation out;
    std::vector<std::pair<std::string, std::size_t>> pending{{grammar.start(), 0}};
    while (!pending.empty()) {
        auto [symbol, depth] = pending.back();
        pending.pop_back();
        if (depth >= kMaxDerivationDepth) throw DomainError("derivation exceeds the maximum depth");
        if (out.steps.size() >= kMaxDerivationSteps) throw DomainError("derivation exceeds the maximum length");
        const auto& rules = grammar.rules_for(symbol);
        const std::size_t choice = rules.size() > 1 ? decoder.decode(grammar.table_for(symbol)) : 0;
        out.steps.push_back({symbol, choice});
        const auto& rule = rules[choice];
        if (!rule.lexical)
            for (auto it = rule.rhs.rbegin(); it != rule.rhs.rend(); ++it) pending.emplace_back(*it, depth + 1);
    }
    return out;
}

ParseDerivation pcfg_decode(const Pcfg& grammar, const coding::BitString& bits) {
    coding::BitStringSource source(bits);
    return pcfg_decode(grammar, source);
}

} // namespace crm::text
