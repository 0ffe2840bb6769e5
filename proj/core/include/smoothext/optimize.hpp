#pragma once

#include "smoothext/transmission.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smoothext {

/// Open interval (lower, upper).
struct OpenInterval {
    double lower = 0.0;
    double upper = 0.0;

    [[nodiscard]] bool contains(double x) const noexcept { return lower < x && x < upper; }
};

/// Regularization schedule lambda_h = C h^q.
struct Schedule {
    double C = 0.002;
    double q = 2.0;
    std::optional<OpenInterval> admissible_q;
};

/// Throws on C <= 0 or q <= 0. Returns a warning message when q falls outside the
/// declared admissible interval.
std::optional<std::string> check_schedule(const Schedule& schedule);

[[nodiscard]] double lambda_of(const Schedule& schedule, double h);

/// Admissible exponents (0, 2 p' + sigma) for p' in (0, 1] and sigma in (0, 1].
[[nodiscard]] OpenInterval recommended_q(double p_prime, double sigma);

enum class Method : std::uint8_t { lbfgs, cg };

[[nodiscard]] std::string_view to_string(Method m) noexcept;
[[nodiscard]] Method parse_method(std::string_view name);

struct OptimizerOptions {
    Method method = Method::lbfgs;
    double tolerance = 1e-8;  ///< on the gradient norm, relative to its initial value
    int max_iterations = 200;
    double sufficient_decrease = 1e-4;
    double backtracking = 0.5;
    int max_line_search = 30;
    int memory = 10;

    /// eps = 1e-6, 10 iterations, 1 line-search step.
    [[nodiscard]] static OptimizerOptions paper_freefem();
    [[nodiscard]] static OptimizerOptions preset(std::string_view name);

    void validate() const;
};

enum class Termination : std::uint8_t { tolerance, max_iterations, line_search_failure };

[[nodiscard]] std::string_view to_string(Termination t) noexcept;

struct IterationRecord {
    int iter = 0;
    double cost = 0.0;
    double misfit = 0.0;
    double reg = 0.0;
    double gradnorm = 0.0;
    double step = 0.0;
};

struct IterationHistory {
    std::vector<IterationRecord> records;  ///< records[0] is the initial point
    Termination reason = Termination::max_iterations;

    [[nodiscard]] int iterations() const noexcept { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
    /// Header iter,cost,misfit,reg,gradnorm,step, then one row per record.
    [[nodiscard]] std::string to_csv() const;
};

struct MinimizeResult {
    Control w;
    StatePair state;
    IterationHistory history;
};

/// Gradient norm used for stopping: sqrt(g^T M^{-1} g) with M the control metric.
[[nodiscard]] double dual_norm(const DiscreteOperators& ops, const Vector& g);

[[nodiscard]] MinimizeResult minimize(const DiscreteOperators& ops, double lambda, const Control& w0,
                                      const OptimizerOptions& opts = {});

}  // namespace smoothext
