#ifndef FLUXQ_OPTIM_HPP
#define FLUXQ_OPTIM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace fluxq {

struct NelderMeadResult {
    std::vector<double> x;
    double fval = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization (standard reflection/expansion/
/// contraction/shrink coefficients 1, 2, 0.5, 0.5). Terminates when the
/// simplex f-spread drops below ftol or max_iter is reached.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double initial_step,
                                    double ftol = 1e-10, int max_iter = 4000) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += initial_step;

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            f2[i] = fv[idx[i]];
        }
        pts.swap(p2);
        fv.swap(f2);
    };

    NelderMeadResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        order();
        if (std::abs(fv[n] - fv[0]) < ftol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / double(n);

        auto blend = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coeff * (centroid[j] - pts[n][j]);
            return p;
        };

        auto refl = blend(1.0);
        const double f_refl = f(refl);
        if (f_refl < fv[0]) {
            auto expd = blend(2.0);
            const double f_expd = f(expd);
            if (f_expd < f_refl) { pts[n] = expd; fv[n] = f_expd; }
            else { pts[n] = refl; fv[n] = f_refl; }
        } else if (f_refl < fv[n - 1]) {
            pts[n] = refl;
            fv[n] = f_refl;
        } else {
            auto contr = blend(f_refl < fv[n] ? 0.5 : -0.5);
            const double f_contr = f(contr);
            if (f_contr < std::min(f_refl, fv[n])) {
                pts[n] = contr;
                fv[n] = f_contr;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.fval = fv[0];
    res.iterations = it;
    return res;
}

}  // namespace fluxq

#endif
