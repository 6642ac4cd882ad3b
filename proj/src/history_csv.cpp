#include "drcvar/auction_io.hpp"

#include "drcvar/errors.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>
#include <toml.hpp>

namespace drcvar::auction {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

template <typename T>
T parse_field(const std::string& s, int line, const char* what) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InputError(fmt::format("history line {}: invalid {} '{}'", line, what, s));
    return value;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

Eigen::MatrixXd parse_history_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError("history CSV is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_fields(line);
    bool pairs = false;
    if (header == std::vector<std::string>{"customer", "call", "scheduled", "actual"})
        pairs = true;
    else if (header != std::vector<std::string>{"customer", "call", "delta"})
        throw InputError("history CSV header must be 'customer,call,scheduled,actual' or "
                         "'customer,call,delta'");

    std::map<long, std::map<long, double>> by_call; // call -> customer -> delta
    std::map<long, int> customers;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw InputError(fmt::format("history line {}: expected {} fields", line_no, header.size()));
        const long customer = parse_field<long>(fields[0], line_no, "customer id");
        const long call = parse_field<long>(fields[1], line_no, "call id");
        double delta = parse_field<double>(fields[2], line_no, "value");
        if (pairs) delta -= parse_field<double>(fields[3], line_no, "value");
        if (!std::isfinite(delta)) throw InputError(fmt::format("history line {}: non-finite value", line_no));
        if (!by_call[call].emplace(customer, delta).second)
            throw InputError(fmt::format("history line {}: duplicate (customer {}, call {})", line_no,
                                         customer, call));
        customers.emplace(customer, 0);
    }
    if (by_call.empty()) throw InputError("history CSV has no data rows");
    int col = 0;
    for (auto& [id, index] : customers) index = col++;

    Eigen::MatrixXd deviations(static_cast<Eigen::Index>(by_call.size()), col);
    Eigen::Index row = 0;
    for (const auto& [call, values] : by_call) {
        if (static_cast<int>(values.size()) != col)
            throw InputError(fmt::format("history is not rectangular: call {} has {} of {} customers",
                                         call, values.size(), col));
        for (const auto& [customer, delta] : values) deviations(row, customers.at(customer)) = delta;
        ++row;
    }
    return deviations;
}

Eigen::MatrixXd read_history_csv(const std::filesystem::path& path) {
    return parse_history_csv(read_text(path));
}

std::string format_history_csv(const Eigen::MatrixXd& deviations) {
    std::string out = "customer,call,delta\n";
    for (Eigen::Index k = 0; k < deviations.rows(); ++k)
        for (Eigen::Index n = 0; n < deviations.cols(); ++n)
            out += fmt::format("{},{},{}\n", n, k, deviations(k, n));
    return out;
}

namespace {

std::vector<double> number_array(const toml::table& table, const char* key, const std::string& where) {
    const auto* arr = table[key].as_array();
    if (!arr) throw InputError(fmt::format("{}: missing array '{}'", where, key));
    std::vector<double> out;
    for (const auto& node : *arr) {
        const auto v = node.value<double>();
        if (!v) throw InputError(fmt::format("{}: '{}' must hold numbers", where, key));
        out.push_back(*v);
    }
    return out;
}

} // namespace

AuctionInstance read_instance_toml(const std::filesystem::path& path) {
    toml::table root;
    try {
        root = toml::parse_file(path.string());
    } catch (const toml::parse_error& e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.description()));
    }
    const std::string where = path.string();
    AuctionInstance inst;
    const auto target = root["D_t"].value<double>();
    if (!target) throw InputError(fmt::format("{}: missing number 'D_t'", where));
    inst.target = *target;
    const auto* customers = root["customers"].as_table();
    if (!customers) throw InputError(fmt::format("{}: missing table [customers]", where));
    inst.bids = number_array(*customers, "r", where);
    inst.prices = number_array(*customers, "pi", where);
    const auto history = root["history"]["path"].value<std::string>();
    if (!history) throw InputError(fmt::format("{}: missing string [history] path", where));
    std::filesystem::path history_path(*history);
    if (history_path.is_relative()) history_path = path.parent_path() / history_path;
    inst.deviations = read_history_csv(history_path);
    inst.validate();
    return inst;
}

} // namespace drcvar::auction
