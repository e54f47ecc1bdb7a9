#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pmarket {

struct Variable {
    std::string name;
    std::size_t cardinality = 0;
    /// Optional outcome names; empty or exactly `cardinality` entries.
    std::vector<std::string> labels;

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Finite set of mutually exclusive goods: the joint outcomes of a list of
/// discrete variables, enumerated lexicographically in declaration order
/// (the last variable varies fastest).
class OutcomeSpace {
public:
    /// Explicit enumeration cap on the number of goods.
    static constexpr std::size_t kMaxGoods = std::size_t{1} << 20;

    /// Throws DomainError on an empty list, duplicate names, cardinality < 2,
    /// mismatched label counts or more than kMaxGoods goods.
    explicit OutcomeSpace(std::vector<Variable> variables);

    /// A single unnamed variable whose outcomes are the given labels.
    static OutcomeSpace flat(std::vector<std::string> outcomes);

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    std::size_t num_goods() const noexcept { return num_goods_; }
    std::size_t num_variables() const noexcept { return variables_.size(); }
    bool is_flat() const noexcept { return flat_; }

    /// Lexicographic index of a full assignment. Throws DomainError when the
    /// assignment has the wrong length or a value out of range.
    std::size_t good_index(std::span<const std::size_t> assignment) const;

    /// Inverse of good_index.
    std::vector<std::size_t> assignment(std::size_t good) const;

    /// Position of a variable by name; throws DomainError if unknown.
    std::size_t position(std::string_view name) const;

    /// Space over the named variables, in the order given.
    OutcomeSpace subspace(std::span<const std::string> names) const;

    friend bool operator==(const OutcomeSpace&, const OutcomeSpace&) = default;

private:
    std::vector<Variable> variables_;
    std::vector<std::size_t> strides_;
    std::size_t num_goods_ = 0;
    bool flat_ = false;
};

}  // namespace pmarket
