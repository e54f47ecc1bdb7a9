#include "pmarket/outcome_space.hpp"

#include <algorithm>
#include <set>

#include "pmarket/errors.hpp"

namespace pmarket {

OutcomeSpace::OutcomeSpace(std::vector<Variable> variables) : variables_(std::move(variables)) {
    if (variables_.empty()) throw DomainError("outcome space needs at least one variable");

    std::set<std::string> names;
    num_goods_ = 1;
    for (const auto& v : variables_) {
        if (!names.insert(v.name).second)
            throw DomainError("duplicate variable name '" + v.name + "'");
        if (v.cardinality < 2)
            throw DomainError("variable '" + v.name + "' has cardinality < 2");
        if (!v.labels.empty() && v.labels.size() != v.cardinality)
            throw DomainError("variable '" + v.name + "' label count does not match cardinality");
        if (num_goods_ > kMaxGoods / v.cardinality)
            throw DomainError("outcome space exceeds the cap of 2^20 goods");
        num_goods_ *= v.cardinality;
    }

    strides_.assign(variables_.size(), 1);
    for (std::size_t j = variables_.size(); j-- > 1;)
        strides_[j - 1] = strides_[j] * variables_[j].cardinality;
}

OutcomeSpace OutcomeSpace::flat(std::vector<std::string> outcomes) {
    Variable v{"outcome", outcomes.size(), std::move(outcomes)};
    OutcomeSpace space({std::move(v)});
    space.flat_ = true;
    return space;
}

std::size_t OutcomeSpace::good_index(std::span<const std::size_t> assignment) const {
    if (assignment.size() != variables_.size())
        throw DomainError("assignment covers " + std::to_string(assignment.size()) + " of " +
                          std::to_string(variables_.size()) + " variables");
    std::size_t index = 0;
    for (std::size_t j = 0; j < assignment.size(); ++j) {
        if (assignment[j] >= variables_[j].cardinality)
            throw DomainError("value " + std::to_string(assignment[j]) + " out of range for '" +
                              variables_[j].name + "'");
        index += assignment[j] * strides_[j];
    }
    return index;
}

std::vector<std::size_t> OutcomeSpace::assignment(std::size_t good) const {
    if (good >= num_goods_) throw DomainError("good index " + std::to_string(good) + " out of range");
    std::vector<std::size_t> values(variables_.size());
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        values[j] = good / strides_[j];
        good %= strides_[j];
    }
    return values;
}

std::size_t OutcomeSpace::position(std::string_view name) const {
    auto it = std::find_if(variables_.begin(), variables_.end(),
                           [&](const Variable& v) { return v.name == name; });
    if (it == variables_.end()) throw DomainError("unknown variable '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - variables_.begin());
}

OutcomeSpace OutcomeSpace::subspace(std::span<const std::string> names) const {
    if (names.empty()) throw DomainError("subspace must name at least one variable");
    std::vector<Variable> picked;
    picked.reserve(names.size());
    for (const auto& name : names) picked.push_back(variables_[position(name)]);
    return OutcomeSpace(std::move(picked));
}

}  // namespace pmarket
