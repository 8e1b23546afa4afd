#include "smpred/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "smpred/rng.hpp"

namespace smpred::nn {

GradCheckResult grad_check(std::vector<TensorView> params,
                           const std::function<void()>& compute_grads,
                           const std::function<double()>& loss, const GradCheckConfig& cfg) {
    compute_grads();
    std::vector<Matrix> analytic;
    analytic.reserve(params.size());
    for (const TensorView& p : params) analytic.push_back(*p.grad);

    Rng rng = Rng::stream(cfg.seed, "gradcheck");
    GradCheckResult result;

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Matrix& value = *params[pi].value;
        const auto n = static_cast<std::size_t>(value.size());
        const std::size_t k = std::min(cfg.samples_per_tensor, n);
        std::vector<std::size_t> picks = rng.sample_without_replacement(n, k);

        for (std::size_t idx : picks) {
            double* entry = value.data() + idx;
            const double original = *entry;

            *entry = original + cfg.step;
            const double up = loss();
            *entry = original - cfg.step;
            const double down = loss();
            *entry = original;

            const double numeric = (up - down) / (2.0 * cfg.step);
            const double a = analytic[pi].data()[idx];
            const double rel =
                std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
            ++result.entries_checked;
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_tensor = params[pi].name;
                result.worst_index = idx;
                result.worst_analytic = a;
                result.worst_numeric = numeric;
            }
        }
    }
    return result;
}

}  // namespace smpred::nn
