#include "pmarket/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pmarket/errors.hpp"

namespace pmarket::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key, "missing field");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path, "expected a number");
    return v.get<double>();
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) throw ParseError(path, "expected a string");
    return v.get<std::string>();
}

std::size_t count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError(path, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t j = 0; j < v.size(); ++j)
        out.push_back(number(v[j], path + "[" + std::to_string(j) + "]"));
    return out;
}

std::vector<std::string> strings(const json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t j = 0; j < v.size(); ++j)
        out.push_back(text(v[j], path + "[" + std::to_string(j) + "]"));
    return out;
}

OutcomeSpace parse_space(const json& v) {
    const std::string path = "space";
    if (!v.is_object()) throw ParseError(path, "expected an object");
    const bool has_vars = v.contains("variables");
    const bool has_outcomes = v.contains("outcomes");
    if (has_vars == has_outcomes)
        throw ParseError(path, "give exactly one of 'variables' or 'outcomes'");
    try {
        if (has_outcomes) return OutcomeSpace::flat(strings(v["outcomes"], path + ".outcomes"));

        const json& vars = v["variables"];
        if (!vars.is_array()) throw ParseError(path + ".variables", "expected an array");
        std::vector<Variable> out;
        for (std::size_t j = 0; j < vars.size(); ++j) {
            const std::string vp = path + ".variables[" + std::to_string(j) + "]";
            Variable var;
            var.name = text(field(vars[j], "name", vp), vp + ".name");
            var.cardinality = count(field(vars[j], "cardinality", vp), vp + ".cardinality");
            if (vars[j].contains("labels")) var.labels = strings(vars[j]["labels"], vp + ".labels");
            out.push_back(std::move(var));
        }
        return OutcomeSpace(std::move(out));
    } catch (const DomainError& e) {
        throw ParseError(path, e.what());
    }
}

BehaviorSpec parse_behavior(const json& v, const std::string& path) {
    BehaviorSpec b;
    const auto name = text(field(v, "kind", path), path + ".kind");
    const auto kind = parse_behavior_kind(name);
    if (!kind) throw ParseError(path + ".kind", "unknown behavior kind '" + name + "'");
    b.kind = *kind;
    if (v.contains("eta")) b.eta = number(v["eta"], path + ".eta");
    if (v.contains("epsilon")) b.epsilon = number(v["epsilon"], path + ".epsilon");
    return b;
}

Agent parse_agent(const json& v, const std::string& path) {
    Agent a;
    a.id = text(field(v, "id", path), path + ".id");
    a.wealth = number(field(v, "wealth", path), path + ".wealth");
    a.behavior = parse_behavior(field(v, "behavior", path), path + ".behavior");
    const json& belief = field(v, "belief", path);
    a.belief = BeliefVector(numbers(field(belief, "table", path + ".belief"), path + ".belief.table"));
    if (belief.contains("subspace")) {
        a.subspace = strings(belief["subspace"], path + ".belief.subspace");
        if (a.subspace.empty()) throw ParseError(path + ".belief.subspace", "subspace is empty");
    }
    return a;
}

json parse_json(std::string_view text_in, const std::string& where) {
    try {
        return json::parse(text_in);
    } catch (const json::parse_error& e) {
        // Message carries "at line L, column C".
        throw ParseError(where, e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

MarketSpec parse_market(std::string_view text_in) {
    const json doc = parse_json(text_in, "market");
    if (!doc.is_object()) throw ParseError("market", "expected a JSON object");

    const auto version = count(field(doc, "format_version", "market"), "format_version");
    if (version != static_cast<std::size_t>(kFormatVersion))
        throw ParseError("format_version", "unsupported version " + std::to_string(version));

    MarketSpec spec{parse_space(field(doc, "space", "market")), {}};
    const json& agents = field(doc, "agents", "market");
    if (!agents.is_array()) throw ParseError("agents", "expected an array");
    for (std::size_t i = 0; i < agents.size(); ++i)
        spec.agents.push_back(parse_agent(agents[i], "agents[" + std::to_string(i) + "]"));

    const auto problems = validate_market(spec);
    if (!problems.empty()) {
        std::string joined;
        for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
        throw ParseError("agents", joined);
    }
    return renormalized(std::move(spec));
}

MarketSpec load_market(const std::filesystem::path& path) { return parse_market(read_file(path)); }

std::string serialize_market(const MarketSpec& spec) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    if (spec.space.is_flat()) {
        doc["space"]["outcomes"] = spec.space.variables().front().labels;
    } else {
        auto vars = ordered_json::array();
        for (const auto& v : spec.space.variables()) {
            ordered_json jv;
            jv["name"] = v.name;
            jv["cardinality"] = v.cardinality;
            if (!v.labels.empty()) jv["labels"] = v.labels;
            vars.push_back(std::move(jv));
        }
        doc["space"]["variables"] = std::move(vars);
    }
    auto agents = ordered_json::array();
    for (const auto& a : spec.agents) {
        ordered_json ja;
        ja["id"] = a.id;
        ja["wealth"] = a.wealth;
        ja["behavior"]["kind"] = std::string(to_string(a.behavior.kind));
        if (a.behavior.kind == BehaviorKind::isoelastic_utility) ja["behavior"]["eta"] = a.behavior.eta;
        if (a.behavior.kind == BehaviorKind::aggressive_bet) ja["behavior"]["epsilon"] = a.behavior.epsilon;
        if (!a.full_scope()) ja["belief"]["subspace"] = a.subspace;
        ja["belief"]["table"] = a.belief.vec();
        agents.push_back(std::move(ja));
    }
    doc["agents"] = std::move(agents);
    return doc.dump(2) + "\n";
}

DatasetReader::DatasetReader(std::istream& in, const MarketSpec& spec)
    : in_(&in), agents_(spec.agents.size()), goods_(spec.space.num_goods()) {}

std::optional<TrainingInstance> DatasetReader::next() {
    std::string line;
    while (std::getline(*in_, line)) {
        ++line_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        const std::string where = "line " + std::to_string(line_);
        const json rec = parse_json(line, where);
        TrainingInstance inst;
        const json& rows = field(rec, "beliefs", where);
        if (!rows.is_array() || rows.size() != agents_)
            throw ParseError(where + ".beliefs", "expected " + std::to_string(agents_) + " belief rows");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string rp = where + ".beliefs[" + std::to_string(i) + "]";
            auto p = numbers(rows[i], rp);
            if (p.size() != goods_)
                throw ParseError(rp, "expected " + std::to_string(goods_) + " entries");
            for (double x : p)
                if (!(x >= 0.0) || !std::isfinite(x)) throw ParseError(rp, "negative or non-finite entry");
            const double total = sum(p);
            if (std::abs(total - 1.0) > kBeliefTolerance) throw ParseError(rp, "row does not sum to 1");
            for (double& x : p) x /= total;
            inst.beliefs.emplace_back(std::move(p));
        }
        inst.label = count(field(rec, "label", where), where + ".label");
        if (inst.label >= goods_) throw ParseError(where + ".label", "label out of range");
        return inst;
    }
    return std::nullopt;
}

std::vector<TrainingInstance> load_dataset(const std::filesystem::path& path, const MarketSpec& spec) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), "cannot open file");
    DatasetReader reader(in, spec);
    std::vector<TrainingInstance> out;
    while (auto inst = reader.next()) out.push_back(std::move(*inst));
    return out;
}

std::string format_number(double x) {
    if (x == 0.0) return "0";  // folds -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double rounded(double x) { return std::stod(format_number(x)); }

}  // namespace pmarket::io
