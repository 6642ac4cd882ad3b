#include "drcvar/milp/lp_file.hpp"

#include "drcvar/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace drcvar::milp {

namespace {

constexpr int kTermsPerLine = 8;

std::string number(double v) {
    if (v == kInfinity) return "inf";
    if (v == -kInfinity) return "-inf";
    char buf[64];
    const auto result = std::to_chars(std::begin(buf), std::end(buf), v);
    return {buf, result.ptr};
}

std::string relation_token(Relation r) {
    switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
    }
    return "?";
}

void write_terms(std::ostream& out, const LpModel& model, const std::vector<Term>& terms) {
    int on_line = 0;
    for (const auto& t : terms) {
        if (on_line == kTermsPerLine) {
            out << "\n   ";
            on_line = 0;
        }
        const double c = t.coefficient;
        out << (std::signbit(c) ? " - " : " + ") << number(std::abs(c)) << ' '
            << model.column(t.column).name;
        ++on_line;
    }
}

} // namespace

void write_lp(const LpModel& model, std::ostream& out) {
    model.validate();
    out << "\\ drcvar LP export: " << model.column_count() << " columns, " << model.row_count()
        << " rows\n";
    out << "Minimize\n obj:";
    std::vector<Term> objective;
    objective.reserve(static_cast<std::size_t>(model.column_count()));
    for (int j = 0; j < model.column_count(); ++j) objective.push_back({j, model.column(j).objective});
    write_terms(out, model, objective);
    out << "\nSubject To\n";
    for (const auto& row : model.rows()) {
        out << ' ' << row.name << ':';
        if (row.terms.empty()) {
            if (model.column_count() == 0)
                throw InputError(fmt::format("row '{}' is empty and the model has no columns", row.name));
            write_terms(out, model, {{0, 0.0}});
        } else {
            write_terms(out, model, row.terms);
        }
        out << ' ' << relation_token(row.relation) << ' ' << number(row.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& col : model.columns()) {
        const bool default_bounds = col.binary ? (col.lower == 0.0 && col.upper == 1.0)
                                               : (col.lower == 0.0 && col.upper == kInfinity);
        if (default_bounds) continue;
        out << ' ';
        if (col.lower == -kInfinity && col.upper == kInfinity)
            out << col.name << " free";
        else if (col.lower == col.upper)
            out << col.name << " = " << number(col.lower);
        else if (col.upper == kInfinity)
            out << col.name << " >= " << number(col.lower);
        else
            out << number(col.lower) << " <= " << col.name << " <= " << number(col.upper);
        out << '\n';
    }
    bool any_binary = false;
    for (const auto& col : model.columns()) {
        if (!col.binary) continue;
        if (!any_binary) out << "Binaries\n";
        any_binary = true;
        out << ' ' << col.name << '\n';
    }
    out << "End\n";
}

std::string to_lp_string(const LpModel& model) {
    std::ostringstream out;
    write_lp(model, out);
    return out.str();
}

void write_lp_file(const LpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    write_lp(model, out);
    out.flush();
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

namespace {

enum class Section { None, Objective, Constraints, Bounds, Binaries, End };

enum class TokenKind { Name, Number, Sign, Relation, Colon };

struct Token {
    TokenKind kind;
    std::string text;
    double value = 0.0;
    int line = 0;
};

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<Section> section_keyword(const std::string& line) {
    std::string key = lowercase(trim(line));
    std::string squashed;
    for (char c : key)
        if (c != ' ' && c != '\t') squashed += c;
    if (squashed == "minimize" || squashed == "minimise" || squashed == "minimum" || squashed == "min")
        return Section::Objective;
    if (squashed == "maximize" || squashed == "maximise" || squashed == "maximum" || squashed == "max")
        throw InputError("maximization models are not supported");
    if (squashed == "subjectto" || squashed == "suchthat" || squashed == "st" || squashed == "s.t.")
        return Section::Constraints;
    if (squashed == "bounds" || squashed == "bound") return Section::Bounds;
    if (squashed == "binaries" || squashed == "binary" || squashed == "bin") return Section::Binaries;
    if (squashed == "generals" || squashed == "general" || squashed == "gen")
        throw InputError("general integer columns are not supported");
    if (squashed == "end") return Section::End;
    return std::nullopt;
}

bool name_char(char ch) {
    constexpr std::string_view extra = "!\"#$%&()/,.;?@_`'{}|~";
    return std::isalnum(static_cast<unsigned char>(ch)) || extra.find(ch) != std::string_view::npos;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw InputError(fmt::format("LP parse error at line {}: {}", line, what));
}

void tokenize(const std::string& text, int line, std::vector<Token>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ':') {
            out.push_back({TokenKind::Colon, ":", 0.0, line});
            ++i;
        } else if (c == '+' || c == '-') {
            out.push_back({TokenKind::Sign, std::string(1, c), 0.0, line});
            ++i;
        } else if (c == '<' || c == '>' || c == '=') {
            std::size_t j = i + 1;
            if (j < text.size() && (text[j] == '=' || text[j] == '<' || text[j] == '>')) ++j;
            std::string op = text.substr(i, j - i);
            if (op == "<" || op == "=<") op = "<=";
            if (op == ">" || op == "=>") op = ">=";
            if (op != "<=" && op != ">=" && op != "=") fail(line, "bad relation '" + op + "'");
            out.push_back({TokenKind::Relation, op, 0.0, line});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const auto res = std::from_chars(text.data() + i, text.data() + text.size(), v);
            if (res.ec != std::errc()) fail(line, "bad number");
            const std::size_t j = static_cast<std::size_t>(res.ptr - text.data());
            out.push_back({TokenKind::Number, text.substr(i, j - i), v, line});
            i = j;
        } else if (name_char(c)) {
            std::size_t j = i;
            while (j < text.size() && name_char(text[j])) ++j;
            std::string name = text.substr(i, j - i);
            const std::string low = lowercase(name);
            if (low == "inf" || low == "infinity")
                out.push_back({TokenKind::Number, name, kInfinity, line});
            else
                out.push_back({TokenKind::Name, name, 0.0, line});
            i = j;
        } else {
            fail(line, fmt::format("unexpected character '{}'", c));
        }
    }
}

class Parser {
public:
    LpModel parse(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        Section section = Section::None;
        std::vector<Token> objective_tokens;
        std::vector<Token> constraint_tokens;
        while (std::getline(in, raw)) {
            ++line_no;
            if (const auto pos = raw.find('\\'); pos != std::string::npos) raw.erase(pos);
            if (trim(raw).empty()) continue;
            if (const auto key = section_keyword(raw)) {
                if (*key <= section && *key != Section::End)
                    fail(line_no, "section out of order");
                section = *key;
                if (section == Section::End) break;
                continue;
            }
            switch (section) {
            case Section::None: fail(line_no, "content before the objective section");
            case Section::Objective: tokenize(raw, line_no, objective_tokens); break;
            case Section::Constraints: tokenize(raw, line_no, constraint_tokens); break;
            case Section::Bounds: {
                std::vector<Token> tokens;
                tokenize(raw, line_no, tokens);
                pending_bounds_.push_back(std::move(tokens));
                break;
            }
            case Section::Binaries: {
                std::vector<Token> tokens;
                tokenize(raw, line_no, tokens);
                for (const auto& t : tokens) {
                    if (t.kind != TokenKind::Name) fail(line_no, "expected a column name");
                    binaries_.push_back(t.text);
                }
                break;
            }
            case Section::End: break;
            }
        }
        if (section != Section::End) fail(line_no, "missing End");
        if (!objective_done_) finish_objective(objective_tokens);
        parse_constraints(constraint_tokens);
        for (const auto& tokens : pending_bounds_) parse_bound(tokens);
        for (const auto& name : binaries_) {
            const int j = column_for(name, 0);
            const auto& col = model_.column(j);
            const double lo = explicit_bounds_[static_cast<std::size_t>(j)] ? col.lower : 0.0;
            const double hi = explicit_bounds_[static_cast<std::size_t>(j)] ? col.upper : 1.0;
            pending_binary_.push_back({j, lo, hi});
        }
        return finish();
    }

private:
    struct PendingRow {
        std::string name;
        std::vector<Term> terms;
        Relation relation;
        double rhs;
    };
    struct PendingBinary {
        int column;
        double lower;
        double upper;
    };

    int column_for(const std::string& name, int line) {
        if (const auto it = index_.find(name); it != index_.end()) return it->second;
        if (!is_valid_lp_name(name)) fail(line, "invalid name '" + name + "'");
        const int j = model_.add_column(name, 0.0, kInfinity, 0.0);
        index_.emplace(name, j);
        explicit_bounds_.push_back(false);
        return j;
    }

    // Reads [sign] [number] name terms from tokens[pos] until a relation or
    // the end; returns the position after the last term.
    std::size_t read_terms(const std::vector<Token>& tokens, std::size_t pos, std::vector<Term>& terms,
                           bool stop_at_name_colon) {
        while (pos < tokens.size()) {
            if (tokens[pos].kind == TokenKind::Relation) break;
            if (stop_at_name_colon && pos + 1 < tokens.size() && tokens[pos].kind == TokenKind::Name &&
                tokens[pos + 1].kind == TokenKind::Colon)
                break;
            double sign = 1.0;
            while (pos < tokens.size() && tokens[pos].kind == TokenKind::Sign) {
                if (tokens[pos].text == "-") sign = -sign;
                ++pos;
            }
            double coef = 1.0;
            if (pos < tokens.size() && tokens[pos].kind == TokenKind::Number) {
                coef = tokens[pos].value;
                ++pos;
            }
            if (pos >= tokens.size() || tokens[pos].kind != TokenKind::Name)
                fail(pos < tokens.size() ? tokens[pos].line : 0, "expected a column name in a term");
            terms.push_back({column_for(tokens[pos].text, tokens[pos].line), sign * coef});
            ++pos;
        }
        return pos;
    }

    void finish_objective(const std::vector<Token>& tokens) {
        objective_done_ = true;
        std::size_t pos = 0;
        if (tokens.size() >= 2 && tokens[0].kind == TokenKind::Name && tokens[1].kind == TokenKind::Colon)
            pos = 2;
        std::vector<Term> terms;
        pos = read_terms(tokens, pos, terms, false);
        if (pos != tokens.size()) fail(tokens[pos].line, "unexpected token in objective");
        for (const auto& t : terms) objective_.emplace_back(t.column, t.coefficient);
    }

    void parse_constraints(const std::vector<Token>& tokens) {
        std::size_t pos = 0;
        while (pos < tokens.size()) {
            PendingRow row;
            const int line = tokens[pos].line;
            if (pos + 1 < tokens.size() && tokens[pos].kind == TokenKind::Name &&
                tokens[pos + 1].kind == TokenKind::Colon) {
                row.name = tokens[pos].text;
                pos += 2;
            }
            pos = read_terms(tokens, pos, row.terms, true);
            if (pos >= tokens.size() || tokens[pos].kind != TokenKind::Relation)
                fail(line, "constraint without a relation");
            const std::string& op = tokens[pos].text;
            row.relation = op == "<=" ? Relation::LessEqual
                                      : op == ">=" ? Relation::GreaterEqual : Relation::Equal;
            ++pos;
            double sign = 1.0;
            while (pos < tokens.size() && tokens[pos].kind == TokenKind::Sign) {
                if (tokens[pos].text == "-") sign = -sign;
                ++pos;
            }
            if (pos >= tokens.size() || tokens[pos].kind != TokenKind::Number)
                fail(line, "constraint without a right-hand side");
            row.rhs = sign * tokens[pos].value;
            ++pos;
            rows_.push_back(std::move(row));
        }
    }

    double read_signed_number(const std::vector<Token>& t, std::size_t& pos, int line) {
        double sign = 1.0;
        while (pos < t.size() && t[pos].kind == TokenKind::Sign) {
            if (t[pos].text == "-") sign = -sign;
            ++pos;
        }
        if (pos >= t.size() || t[pos].kind != TokenKind::Number) fail(line, "expected a number");
        return sign * t[pos++].value;
    }

    void parse_bound(const std::vector<Token>& t) {
        if (t.empty()) return;
        const int line = t.front().line;
        auto set = [&](int j, std::optional<double> lo, std::optional<double> hi) {
            const auto& col = model_.column(j);
            model_.set_bounds(j, lo.value_or(col.lower), hi.value_or(col.upper));
            explicit_bounds_[static_cast<std::size_t>(j)] = true;
        };
        if (t[0].kind == TokenKind::Name) {
            const int j = column_for(t[0].text, line);
            if (t.size() == 2 && t[1].kind == TokenKind::Name && lowercase(t[1].text) == "free") {
                set(j, -kInfinity, kInfinity);
                return;
            }
            if (t.size() < 3 || t[1].kind != TokenKind::Relation) fail(line, "malformed bound");
            std::size_t pos = 2;
            const double v = read_signed_number(t, pos, line);
            if (pos != t.size()) fail(line, "trailing tokens in bound");
            if (t[1].text == "<=") set(j, std::nullopt, v);
            else if (t[1].text == ">=") set(j, v, std::nullopt);
            else set(j, v, v);
            return;
        }
        // l <= x [<= u]
        std::size_t pos = 0;
        const double lo = read_signed_number(t, pos, line);
        if (pos + 1 >= t.size() || t[pos].kind != TokenKind::Relation || t[pos].text != "<=" ||
            t[pos + 1].kind != TokenKind::Name)
            fail(line, "malformed bound");
        const int j = column_for(t[pos + 1].text, line);
        pos += 2;
        if (pos == t.size()) {
            set(j, lo, std::nullopt);
            return;
        }
        if (t[pos].kind != TokenKind::Relation || t[pos].text != "<=") fail(line, "malformed bound");
        ++pos;
        const double hi = read_signed_number(t, pos, line);
        if (pos != t.size()) fail(line, "trailing tokens in bound");
        set(j, lo, hi);
    }

    LpModel finish() {
        for (const auto& [j, c] : objective_) model_.set_objective(j, model_.column(j).objective + c);
        // Binary columns are flagged by rebuilding through add_binary so the
        // model invariants hold; columns keep their original order.
        LpModel out;
        std::vector<int> binary_flag(static_cast<std::size_t>(model_.column_count()), 0);
        std::vector<std::pair<double, double>> binary_bounds(static_cast<std::size_t>(model_.column_count()));
        for (const auto& b : pending_binary_) {
            binary_flag[static_cast<std::size_t>(b.column)] = 1;
            binary_bounds[static_cast<std::size_t>(b.column)] = {b.lower, b.upper};
        }
        for (int j = 0; j < model_.column_count(); ++j) {
            const auto& col = model_.column(j);
            if (binary_flag[static_cast<std::size_t>(j)]) {
                out.add_binary(col.name, col.objective);
                const auto [lo, hi] = binary_bounds[static_cast<std::size_t>(j)];
                out.set_bounds(j, lo, hi);
            } else {
                out.add_column(col.name, col.lower, col.upper, col.objective);
            }
        }
        for (auto& row : rows_) out.add_row(row.name, std::move(row.terms), row.relation, row.rhs);
        out.validate();
        return out;
    }

    LpModel model_;
    std::unordered_map<std::string, int> index_;
    std::vector<bool> explicit_bounds_;
    std::vector<std::pair<int, double>> objective_;
    std::vector<PendingRow> rows_;
    std::vector<std::vector<Token>> pending_bounds_;
    std::vector<std::string> binaries_;
    std::vector<PendingBinary> pending_binary_;
    bool objective_done_ = false;
};

} // namespace

LpModel parse_lp(const std::string& text) { return Parser().parse(text); }

LpModel read_lp_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_lp(buffer.str());
}

} // namespace drcvar::milp
