#include "gauss_extrema/compare.hpp"

#include <algorithm>
#include <cmath>

#include "gauss_extrema/errors.hpp"

namespace gx {

bool RatioRow::has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

namespace {

void add_flags(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& f : from)
        if (std::find(into.begin(), into.end(), f) == into.end()) into.push_back(f);
}

}  // namespace

std::vector<RatioRow> ratio_table(ComparisonProblem& problem, std::span<const double> u_grid, const RatioOptions& opts) {
    for (std::size_t k = 1; k < u_grid.size(); ++k)
        if (!(u_grid[k] > u_grid[k - 1])) throw ConfigError("u_grid must be strictly increasing");
    if (opts.mc.n_reps < 100) throw DomainError("n_reps must be at least 100");
    const std::uint64_t pilot_reps =
        opts.pilot_reps > 0 ? opts.pilot_reps : std::max<std::uint64_t>(100, opts.mc.n_reps / 10);

    std::vector<RatioRow> rows;
    rows.reserve(u_grid.size());
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
        const double u = u_grid[k];
        RatioRow row;
        row.u = u;
        try {
            row.formula = problem.formula(u);
            add_flags(row.flags, row.formula->flags);
        } catch (const InfeasibleError& e) {
            row.flags.emplace_back("formula_unavailable");
        }

        EventSampler sampler = [&problem, u](Rng& rng, std::uint64_t) { return problem.event(u, rng); };
        McOptions pilot = opts.mc;
        pilot.n_reps = pilot_reps;
        pilot.seed = stream_seed(opts.mc.seed, k, 1);
        const McReport pr = run_probability_mc(sampler, pilot);
        const double expected = static_cast<double>(pr.n_success) * static_cast<double>(opts.mc.n_reps) /
                                static_cast<double>(pilot_reps);
        if (expected < opts.min_expected_successes) {
            row.flags.emplace_back("infeasible");
            rows.push_back(std::move(row));
            continue;
        }
        McOptions main = opts.mc;
        main.seed = stream_seed(opts.mc.seed, k, 2);
        row.mc = run_probability_mc(sampler, main);
        add_flags(row.flags, row.mc->flags);
        if (row.has_ratio()) {
            const double f = row.formula->value;
            row.ratio = row.mc->estimate / f;
            row.ratio_lo = row.mc->ci_lo / f;
            row.ratio_hi = row.mc->ci_hi / f;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

HorizonProblem::HorizonProblem(ProblemSpec spec, GridPolicy grid, Theorem31Options formula_opts)
    : spec_(std::move(spec)), grid_(grid), formula_opts_(std::move(formula_opts)) {}

AsymptoticValue HorizonProblem::formula(double u) {
    if (spec_.n_zero() == 0) return theorem31_case_ii(spec_, u, formula_opts_);
    if (!nu_tilde_) nu_tilde_ = theorem31_nu_tilde(spec_, formula_opts_);
    return theorem31_case_i(spec_, u, *nu_tilde_, formula_opts_);
}

double HorizonProblem::window(std::size_t i, double u) const {
    const auto& c = spec_.coords()[i];
    const double h = c.profile.index_at_infinity();
    const double t_star = h / (1.0 - h);
    return 4.0 * (t_star + 1.0) * c.coefficient * u / (-c.drift) + 16.0;
}

bool HorizonProblem::event(double u, Rng& rng) const {
    const std::size_t n = spec_.dim();
    thread_local std::vector<double> horizon;
    horizon.resize(n);
    spec_.horizon().sample(rng, horizon);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = spec_.coords()[i];
        double spread = 0.0;
        for (const auto& t : c.profile.terms()) spread += std::sqrt(t.weight) * std::pow(horizon[i], t.hurst);
        const double bound = std::max(0.0, c.drift * horizon[i]) + sup_bound_k_ * spread;
        if (!(bound > c.coefficient * u)) return false;
    }
    thread_local std::vector<double> path;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = spec_.coords()[i];
        double len = horizon[i];
        if (c.drift < 0.0) len = std::min(len, window(i, u));
        if (!(len > 0.0)) return false;
        const std::size_t steps = grid_.intervals(len);
        const double step = len / static_cast<double>(steps);
        path.assign(steps + 1, 0.0);
        add_profile_path(c.profile, step, path, rng);
        if (!(sup_drifted(path, step, c.drift) > c.coefficient * u)) return false;
    }
    return true;
}

InfiniteHorizonProblem::InfiniteHorizonProblem(VarianceProfile profile, double rate, GridPolicy grid,
                                               PickandsProvider pickands, DiekerOptions dieker, Formula formula)
    : profile_(std::move(profile)),
      rate_(rate),
      grid_(grid),
      pickands_(std::move(pickands)),
      dieker_(dieker),
      formula_(formula) {
    if (!(rate_ > 0.0)) throw ConfigError("infinite-horizon problem needs a negative drift");
    if (formula_ == Formula::Corollary && !profile_.is_single_term())
        throw ConfigError("the fBm corollary needs a single-term profile");
}

AsymptoticValue InfiniteHorizonProblem::formula(double u) {
    if (formula_ == Formula::Corollary) {
        const auto& t = profile_.terms().front();
        if (t.weight != 1.0) throw ConfigError("the fBm corollary needs a unit-weight profile");
        return corollary_fbm_psi(t.hurst, rate_, u, pickands_, dieker_.psi_mode);
    }
    return dieker_psi(profile_, rate_, u, pickands_, dieker_);
}

double InfiniteHorizonProblem::window(double u) const {
    const double h = profile_.index_at_infinity();
    return 4.0 * (h / (1.0 - h) + 1.0) * u / rate_ + 16.0;
}

bool InfiniteHorizonProblem::event(double u, Rng& rng) const {
    const double len = window(u);
    const std::size_t steps = grid_.intervals(len);
    const double step = len / static_cast<double>(steps);
    thread_local std::vector<double> path;
    path.assign(steps + 1, 0.0);
    add_profile_path(profile_, step, path, rng);
    return sup_drifted(path, step, -rate_) > u;
}

RegenProblem::RegenProblem(RegenSpec spec, QOptions opts) : spec_(spec), opts_(opts) { spec_.validate(); }

AsymptoticValue RegenProblem::formula(double u) {
    auto v = theorem42_Q(spec_, u);
    v.details.push_back({"abandon_bias", abandon_bias_estimate(spec_, u, opts_.kappa)});
    return v;
}

bool RegenProblem::event(double u, Rng& rng) const { return regen_walk_event(spec_, u, opts_, rng); }

}  // namespace gx
