#include "pmarket/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pmarket/io.hpp"
#include "pmarket/pools.hpp"
#include "pmarket/training.hpp"

namespace pmarket::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kCompareThreshold = 1e-6;

ordered_json rendered(std::span<const double> values) {
    auto out = ordered_json::array();
    for (double x : values) out.push_back(io::rounded(x));
    return out;
}

ordered_json result_record(const EquilibriumResult& r, bool converged) {
    ordered_json rec;
    rec["status"] = converged ? "converged" : "not_converged";
    rec["method"] = std::string(to_string(r.method));
    rec["prices"] = rendered(r.prices.values());
    rec["score"] = io::rounded(r.score);
    rec["iterations"] = r.iterations;
    return rec;
}

void write(std::ostream& out, const ordered_json& rec) { out << rec.dump(2) << "\n"; }

// Runs `body`, mapping input problems to exit 2 with a diagnostic.
template <class Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    }
    return kInputError;
}

struct EtaRange {
    double lo = 1.0;
    double hi = 1.0;
    std::size_t steps = 1;
};

EtaRange parse_eta_range(const std::string& spec) {
    EtaRange r;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(spec);
    long long steps = 0;
    if (!(in >> r.lo >> sep1 >> r.hi >> sep2 >> steps) || sep1 != ':' || sep2 != ':' || !in.eof())
        throw ParseError("--eta", "expected lo:hi:steps, got '" + spec + "'");
    if (steps < 1) throw ParseError("--eta", "steps must be at least 1");
    if (!(r.lo > 0.0) || !(r.hi > 0.0)) throw ParseError("--eta", "eta must be positive");
    r.steps = static_cast<std::size_t>(steps);
    return r;
}

}  // namespace

int cmd_clear(const std::filesystem::path& market, const SolverConfig& config, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        const auto spec = io::load_market(market);
        try {
            write(out, result_record(solve(spec, config), true));
            return static_cast<int>(kOk);
        } catch (const NonConvergenceError& e) {
            err << "error: " << e.what() << "\n";
            write(out, result_record(e.best(), false));
            return static_cast<int>(kNotConverged);
        }
    });
}

int cmd_train(const std::filesystem::path& market, const std::filesystem::path& data, TrainMode mode,
              bool trace, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto spec = io::load_market(market);
        if (homogeneous_kind(spec) != BehaviorKind::log_utility) {
            err << "error: training undefined for behavior: wealth updates need a homogeneous "
                   "log_utility market\n";
            return static_cast<int>(kInputError);
        }
        const auto dataset = io::load_dataset(data, spec);

        WealthTrace result;
        try {
            result = mode == TrainMode::online ? train_online(spec, dataset) : train_batch(spec, dataset);
        } catch (const DegeneratePriceError& e) {
            err << "error: " << e.what() << "\n";
            return static_cast<int>(kNotConverged);
        }

        if (trace) {
            out << "step,agent,wealth,price_at_label\n";
            for (std::size_t t = 0; t < result.steps.size(); ++t) {
                const auto& step = result.steps[t];
                for (std::size_t i = 0; i < spec.agents.size(); ++i) {
                    out << t << "," << spec.agents[i].id << "," << io::format_number(step.wealths[i]) << ",";
                    if (t > 0) out << io::format_number(step.price_at_label);
                    out << "\n";
                }
            }
            return static_cast<int>(kOk);
        }

        ordered_json rec;
        rec["mode"] = mode == TrainMode::online ? "online" : "batch";
        rec["instances"] = dataset.size();
        auto ids = ordered_json::array();
        for (const auto& a : spec.agents) ids.push_back(a.id);
        rec["agents"] = std::move(ids);
        rec["wealths"] = rendered(result.final_wealths());
        rec["total_wealth"] = io::rounded(sum(result.final_wealths()));
        write(out, rec);
        return static_cast<int>(kOk);
    });
}

int cmd_compare(const std::filesystem::path& market, const std::string& oracle,
                const SolverConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        if (oracle != "weighted-average" && oracle != "product")
            throw ParseError("--oracle", "expected weighted-average or product, got '" + oracle + "'");
        const auto spec = io::load_market(market);
        for (const auto& a : spec.agents)
            if (!a.full_scope())
                throw DomainError("compare: agent " + a.id + " holds a subspace belief; pools need full beliefs");

        std::vector<BeliefVector> beliefs;
        std::vector<double> wealths;
        for (const auto& a : spec.agents) {
            beliefs.push_back(a.belief);
            wealths.push_back(a.wealth);
        }
        const auto pooled = oracle == "product"
                                ? pools::product_pool(beliefs, 1.0 / static_cast<double>(beliefs.size()))
                                : pools::weighted_average_pool({beliefs, wealths});

        const auto kind = homogeneous_kind(spec);
        const bool eligible =
            oracle == "product" ? kind == BehaviorKind::exp_utility
                                : (kind == BehaviorKind::log_utility || kind == BehaviorKind::constant_bet);

        EquilibriumResult cleared;
        try {
            cleared = solve(spec, config);
        } catch (const NonConvergenceError& e) {
            err << "error: " << e.what() << "\n";
            return static_cast<int>(kNotConverged);
        }

        double gap = 0.0;
        for (std::size_t k = 0; k < pooled.size(); ++k)
            gap = std::max(gap, std::abs(cleared.prices[k] - pooled[k]));

        ordered_json rec;
        rec["oracle"] = oracle;
        rec["eligible"] = eligible;
        rec["method"] = std::string(to_string(cleared.method));
        rec["market_prices"] = rendered(cleared.prices.values());
        rec["oracle_prices"] = rendered(pooled.values());
        rec["gap"] = io::rounded(gap);
        write(out, rec);

        if (gap < kCompareThreshold) return static_cast<int>(kOk);
        if (!eligible) {
            err << "error: " << oracle << " pool is not the equilibrium structure of this market (gap "
                << io::format_number(gap) << ")\n";
            return static_cast<int>(kInputError);
        }
        err << "error: market and pool disagree by " << io::format_number(gap) << "\n";
        return static_cast<int>(kNotConverged);
    });
}

int cmd_sweep(const std::filesystem::path& market, const std::string& eta_range,
              const SolverConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        const auto range = parse_eta_range(eta_range);
        const auto spec = io::load_market(market);
        for (const auto& a : spec.agents) {
            if (!a.full_scope()) throw DomainError("sweep: agent " + a.id + " holds a subspace belief");
            if (!is_utility(a.behavior.kind))
                throw DomainError("sweep: agent " + a.id + " is a betting agent");
        }

        const std::size_t n = spec.space.num_goods();
        out << "eta";
        for (std::size_t k = 0; k < n; ++k) out << ",c_" << k;
        out << ",status\n";

        bool any_failed = false;
        for (std::size_t s = 0; s < range.steps; ++s) {
            const double eta = range.steps == 1
                                   ? range.lo
                                   : range.lo + (range.hi - range.lo) * static_cast<double>(s) /
                                                    static_cast<double>(range.steps - 1);
            MarketSpec iso = spec;
            for (auto& a : iso.agents) a.behavior = {BehaviorKind::isoelastic_utility, eta};

            EquilibriumResult row;
            bool converged = true;
            try {
                row = solve_isoelastic(iso, config);
            } catch (const NonConvergenceError& e) {
                row = e.best();
                converged = false;
                any_failed = true;
            }
            out << io::format_number(eta);
            for (double c : row.prices) out << "," << io::format_number(c);
            out << "," << (converged ? "converged" : "not_converged") << "\n";
        }
        return static_cast<int>(any_failed ? kNotConverged : kOk);
    });
}

}  // namespace pmarket::cli
