#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gauss_extrema/asymptotics.hpp"
#include "gauss_extrema/montecarlo.hpp"
#include "gauss_extrema/regenerative.hpp"

namespace gx {

// A probability p(u) with an asymptotic formula and a crude-MC event.
class ComparisonProblem {
public:
    virtual ~ComparisonProblem() = default;
    virtual AsymptoticValue formula(double u) = 0;
    // One replication of the event at level u.
    virtual bool event(double u, Rng& rng) const = 0;
};

struct RatioRow {
    double u = 0.0;
    std::optional<McReport> mc;
    std::optional<AsymptoticValue> formula;
    double ratio = 0.0;
    double ratio_lo = 0.0;
    double ratio_hi = 0.0;
    std::vector<std::string> flags;

    bool has_ratio() const { return mc.has_value() && formula.has_value() && formula->value > 0.0; }
    bool has_flag(const std::string& f) const;
};

struct RatioOptions {
    McOptions mc;
    std::uint64_t pilot_reps = 0;  // 0: n_reps / 10, at least 100
    double min_expected_successes = 10.0;
};

// Pilot run, then the main run, per u. Seeds are derived from (root, index of u).
std::vector<RatioRow> ratio_table(ComparisonProblem& problem, std::span<const double> u_grid, const RatioOptions& opts);

// sup over [0, T_i] of X_i + c_i t exceeding a_i u in every coordinate.
class HorizonProblem : public ComparisonProblem {
public:
    HorizonProblem(ProblemSpec spec, GridPolicy grid, Theorem31Options formula_opts);

    AsymptoticValue formula(double u) override;
    bool event(double u, Rng& rng) const override;

    const ProblemSpec& spec() const { return spec_; }
    // Observation window used for a negative-drift coordinate.
    double window(std::size_t i, double u) const;

private:
    ProblemSpec spec_;
    GridPolicy grid_;
    Theorem31Options formula_opts_;
    std::optional<TransformedTail> nu_tilde_;
    double sup_bound_k_ = 9.0;
};

// psi(u) = P(sup_{t >= 0} X(t) - c t > u), simulated on a finite window.
class InfiniteHorizonProblem : public ComparisonProblem {
public:
    enum class Formula { Dieker, Corollary };
    InfiniteHorizonProblem(VarianceProfile profile, double rate, GridPolicy grid, PickandsProvider pickands,
                           DiekerOptions dieker, Formula formula);

    AsymptoticValue formula(double u) override;
    bool event(double u, Rng& rng) const override;
    double window(double u) const;

private:
    VarianceProfile profile_;
    double rate_;
    GridPolicy grid_;
    PickandsProvider pickands_;
    DiekerOptions dieker_;
    Formula formula_;
};

class RegenProblem : public ComparisonProblem {
public:
    RegenProblem(RegenSpec spec, QOptions opts);

    AsymptoticValue formula(double u) override;
    bool event(double u, Rng& rng) const override;

private:
    RegenSpec spec_;
    QOptions opts_;
};

}  // namespace gx
