#include "smoothext/optimize.hpp"

#include "smoothext/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <deque>

namespace smoothext {

std::optional<std::string> check_schedule(const Schedule& schedule) {
    if (!(schedule.C > 0.0) || !std::isfinite(schedule.C)) {
        throw InvalidArgument(fmt::format("schedule: C must be positive, got {}", schedule.C));
    }
    if (!(schedule.q > 0.0) || !std::isfinite(schedule.q)) {
        throw InvalidArgument(fmt::format("schedule: q must be positive, got {}", schedule.q));
    }
    if (schedule.admissible_q && !schedule.admissible_q->contains(schedule.q)) {
        return fmt::format("warning: q = {} lies outside the admissible interval ({}, {})", schedule.q,
                           schedule.admissible_q->lower, schedule.admissible_q->upper);
    }
    return std::nullopt;
}

double lambda_of(const Schedule& schedule, double h) {
    (void)check_schedule(schedule);
    if (!(h > 0.0)) {
        throw InvalidArgument(fmt::format("lambda_of: h must be positive, got {}", h));
    }
    return schedule.C * std::pow(h, schedule.q);
}

OpenInterval recommended_q(double p_prime, double sigma) {
    if (!(p_prime > 0.0 && p_prime <= 1.0)) {
        throw InvalidArgument(fmt::format("recommended_q: p' must lie in (0, 1], got {}", p_prime));
    }
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw InvalidArgument(fmt::format("recommended_q: sigma must lie in (0, 1], got {}", sigma));
    }
    return {0.0, 2.0 * p_prime + sigma};
}

std::string_view to_string(Method m) noexcept { return m == Method::lbfgs ? "lbfgs" : "cg"; }

Method parse_method(std::string_view name) {
    if (name == "lbfgs") return Method::lbfgs;
    if (name == "cg") return Method::cg;
    throw InvalidArgument(fmt::format("unknown optimizer method '{}'", name));
}

OptimizerOptions OptimizerOptions::paper_freefem() {
    OptimizerOptions o;
    o.tolerance = 1e-6;
    o.max_iterations = 10;
    o.max_line_search = 1;
    return o;
}

OptimizerOptions OptimizerOptions::preset(std::string_view name) {
    if (name == "default") return {};
    if (name == "paper-freefem") return paper_freefem();
    throw InvalidArgument(fmt::format("unknown optimizer preset '{}'", name));
}

void OptimizerOptions::validate() const {
    if (!(tolerance > 0.0)) throw InvalidArgument("optimizer: tolerance must be positive");
    if (max_iterations < 1) throw InvalidArgument("optimizer: max iterations must be >= 1");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
        throw InvalidArgument("optimizer: sufficient-decrease constant must lie in (0, 1)");
    }
    if (!(backtracking > 0.0 && backtracking < 1.0)) {
        throw InvalidArgument("optimizer: backtracking factor must lie in (0, 1)");
    }
    if (max_line_search < 1) throw InvalidArgument("optimizer: max line-search steps must be >= 1");
    if (memory < 1) throw InvalidArgument("optimizer: memory must be >= 1");
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::tolerance: return "tolerance";
        case Termination::max_iterations: return "max-iterations";
        case Termination::line_search_failure: return "line-search-failure";
    }
    return "unknown";
}

std::string IterationHistory::to_csv() const {
    std::string out = "iter,cost,misfit,reg,gradnorm,step\n";
    for (const auto& r : records) {
        out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.iter, r.cost, r.misfit, r.reg,
                           r.gradnorm, r.step);
    }
    return out;
}

double dual_norm(const DiscreteOperators& ops, const Vector& g) {
    return std::sqrt(std::max(0.0, dot(g, ops.metric_factor.solve(g))));
}

namespace {

struct Evaluation {
    Control w;
    StatePair state;
    Vector d;  ///< interface trace difference
    double misfit = 0.0;
    double reg = 0.0;
    double cost = 0.0;
};

void refresh(const DiscreteOperators& ops, Evaluation& e, double lambda) {
    e.d = trace_difference(ops, e.state);
    e.misfit = 0.5 * dot(e.d, matvec(ops.interface_mass, e.d));
    const double n = control_norm(ops, e.w);
    e.reg = lambda * n * n;
    e.cost = e.misfit + e.reg;
}

Evaluation evaluate(const DiscreteOperators& ops, Control w, double lambda) {
    Evaluation e;
    e.state = solve_state(ops, w);
    e.w = std::move(w);
    refresh(ops, e, lambda);
    return e;
}

// The state is affine in the control, so along a direction p the cost is the exact
// quadratic J(w + t p) = J(w) + t c1 + t^2 c2. Evaluating the change from c1, c2 avoids the
// cancellation of subtracting two nearly equal costs.
struct LineModel {
    StatePair lin;
    double c1 = 0.0;
    double c2 = 0.0;

    [[nodiscard]] double change(double t) const { return t * (c1 + t * c2); }
};

LineModel line_model(const DiscreteOperators& ops, const Evaluation& e, const Vector& p, double lambda,
                     StatePair lin) {
    LineModel m;
    const Vector dd = trace_difference(ops, lin);
    const Vector mdd = matvec(ops.interface_mass, dd);
    const Vector kp = matvec(ops.control_metric, p);
    m.c1 = dot(e.d, mdd) + 2.0 * lambda * dot(e.w, kp);
    m.c2 = 0.5 * dot(dd, mdd) + lambda * dot(p, kp);
    m.lin = std::move(lin);
    return m;
}

Evaluation advance(const DiscreteOperators& ops, const Evaluation& e, const Vector& p, double t,
                   const LineModel& m, double lambda) {
    Evaluation next;
    next.w = e.w;
    axpy(t, p, next.w);
    next.state = e.state;
    axpy(t, m.lin.u.coefficients, next.state.u.coefficients);
    axpy(t, m.lin.u2.coefficients, next.state.u2.coefficients);
    refresh(ops, next, lambda);
    return next;
}

Vector gradient_at(const DiscreteOperators& ops, const Evaluation& e, double lambda) {
    return gradient(ops, e.w, e.state, solve_adjoint(ops, e.state), lambda);
}

IterationRecord record(int iter, const Evaluation& e, double gnorm, double step) {
    return {iter, e.cost, e.misfit, e.reg, gnorm, step};
}

MinimizeResult finish(const DiscreteOperators& ops, Evaluation cur, IterationHistory hist) {
    // Drop the drift of the incrementally updated state.
    StatePair state = solve_state(ops, cur.w);
    return {std::move(cur.w), std::move(state), std::move(hist)};
}

MinimizeResult run_lbfgs(const DiscreteOperators& ops, double lambda, Evaluation cur, const OptimizerOptions& o) {
    IterationHistory hist;
    Vector g = gradient_at(ops, cur, lambda);
    const double g0 = dual_norm(ops, g);
    hist.records.push_back(record(0, cur, g0, 0.0));
    if (g0 == 0.0) {
        hist.reason = Termination::tolerance;
        return finish(ops, std::move(cur), std::move(hist));
    }

    std::deque<Vector> s_hist;
    std::deque<Vector> y_hist;
    std::deque<double> rho_hist;
    double gamma = 1.0;
    hist.reason = Termination::max_iterations;

    for (int it = 1; it <= o.max_iterations; ++it) {
        // Two-loop recursion with initial inverse Hessian gamma * M^{-1}.
        Vector q = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            alpha[k] = rho_hist[k] * dot(s_hist[k], q);
            axpy(-alpha[k], y_hist[k], q);
        }
        Vector d = ops.metric_factor.solve(q);
        for (double& x : d) x *= gamma;
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * dot(y_hist[k], d);
            axpy(alpha[k] - beta, s_hist[k], d);
        }
        for (double& x : d) x = -x;

        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            // Not a descent direction; restart from the preconditioned gradient.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = ops.metric_factor.solve(g);
            for (double& x : d) x = -x;
            slope = dot(g, d);
        }

        const LineModel model = line_model(ops, cur, d, lambda, solve_linearized_state(ops, d));
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < o.max_line_search; ++ls) {
            const double change = model.change(step);
            if (change <= o.sufficient_decrease * step * slope && change < 0.0) {
                accepted = true;
                break;
            }
            step *= o.backtracking;
        }
        if (!accepted) {
            hist.reason = Termination::line_search_failure;
            break;
        }

        Evaluation trial = advance(ops, cur, d, step, model, lambda);
        Vector g_new = gradient_at(ops, trial, lambda);
        Vector s = d;
        for (double& x : s) x *= step;
        Vector y = g_new;
        axpy(-1.0, g, y);
        const double sy = dot(s, y);
        if (sy > 0.0) {
            const double ymy = dot(y, ops.metric_factor.solve(y));
            gamma = sy / ymy;
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > o.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        cur = std::move(trial);
        g = std::move(g_new);
        const double gn = dual_norm(ops, g);
        hist.records.push_back(record(it, cur, gn, step));
        if (gn <= o.tolerance * g0) {
            hist.reason = Termination::tolerance;
            break;
        }
    }
    return finish(ops, std::move(cur), std::move(hist));
}

// Preconditioned conjugate gradients on the quadratic: grad J(w) = H w - b.
MinimizeResult run_cg(const DiscreteOperators& ops, double lambda, Evaluation cur, const OptimizerOptions& o) {
    IterationHistory hist;
    Vector g = gradient_at(ops, cur, lambda);
    const double g0 = dual_norm(ops, g);
    hist.records.push_back(record(0, cur, g0, 0.0));
    if (g0 == 0.0) {
        hist.reason = Termination::tolerance;
        return finish(ops, std::move(cur), std::move(hist));
    }
    Vector r = g;
    for (double& x : r) x = -x;
    Vector z = ops.metric_factor.solve(r);
    Vector p = z;
    double rz = dot(r, z);
    hist.reason = Termination::max_iterations;

    for (int it = 1; it <= o.max_iterations; ++it) {
        StatePair lin = solve_linearized_state(ops, p);
        const Vector hp = gradient(ops, p, lin, solve_adjoint(ops, lin), lambda);
        const double php = dot(p, hp);
        if (!(php > 0.0)) {
            hist.reason = Termination::line_search_failure;
            break;
        }
        const double alpha = rz / php;
        const LineModel model = line_model(ops, cur, p, lambda, std::move(lin));
        if (!(model.change(alpha) < 0.0)) {
            hist.reason = Termination::line_search_failure;
            break;
        }
        Evaluation next = advance(ops, cur, p, alpha, model, lambda);
        axpy(-alpha, hp, r);
        z = ops.metric_factor.solve(r);
        const double rz_new = dot(r, z);
        cur = std::move(next);
        const double gn = std::sqrt(std::max(0.0, rz_new));
        hist.records.push_back(record(it, cur, gn, alpha));
        if (gn <= o.tolerance * g0) {
            hist.reason = Termination::tolerance;
            break;
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    return finish(ops, std::move(cur), std::move(hist));
}

}  // namespace

MinimizeResult minimize(const DiscreteOperators& ops, double lambda, const Control& w0, const OptimizerOptions& opts) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument(fmt::format("minimize: lambda must be positive, got {}", lambda));
    }
    opts.validate();
    if (w0.size() != ops.control_size()) {
        throw InvalidArgument(
            fmt::format("minimize: initial control has length {}, expected {}", w0.size(), ops.control_size()));
    }
    Evaluation start = evaluate(ops, w0, lambda);
    return opts.method == Method::lbfgs ? run_lbfgs(ops, lambda, std::move(start), opts)
                                        : run_cg(ops, lambda, std::move(start), opts);
}

}  // namespace smoothext
