#include "fde/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace fde {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_norm(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool finite(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

struct Point {
    double alpha = 0.0;
    double f = 0.0;
    double d = 0.0; ///< directional derivative
    Vec x, g;
};

/// Minimizer of the cubic through (a, fa, da) and (b, fb, db); NaN if it does not exist.
double cubic_min(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (disc < 0.0) return std::nan("");
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
}

class LineSearch {
public:
    LineSearch(const Objective& f, const LbfgsOptions& o, std::size_t& evals) : f_(f), o_(o), evals_(evals) {}

    /// Returns true with `out` set to an accepted point with f < f0; false if no decrease was found.
    bool run(const Vec& x0, double f0, const Vec& dir, double dphi0, double alpha0, Point& out) {
        x0_ = &x0;
        dir_ = &dir;
        f0_ = f0;
        dphi0_ = dphi0;
        Point prev{0.0, f0, dphi0, x0, {}};
        best_ = prev;
        double alpha = alpha0;
        for (std::size_t i = 0; i < o_.max_line_search && evals_ < o_.max_evals; ++i) {
            Point cur = eval(alpha);
            if (!std::isfinite(cur.f) || !std::isfinite(cur.d)) {
                alpha = 0.5 * (prev.alpha + alpha);
                continue;
            }
            if (cur.f > f0 + o_.c1 * alpha * dphi0 || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur, out);
            if (std::abs(cur.d) <= -o_.c2 * dphi0) {
                out = std::move(cur);
                return true;
            }
            if (cur.d >= 0.0) return zoom(cur, prev, out);
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return fallback(out);
    }

private:
    Point eval(double alpha) {
        Point p;
        p.alpha = alpha;
        p.x = *x0_;
        for (std::size_t i = 0; i < p.x.size(); ++i) p.x[i] += alpha * (*dir_)[i];
        p.g.assign(p.x.size(), 0.0);
        p.f = f_(p.x, &p.g);
        ++evals_;
        p.d = dot(p.g, *dir_);
        if (std::isfinite(p.f) && finite(p.g) && p.f < best_.f && p.f <= f0_ + o_.c1 * alpha * dphi0_) best_ = p;
        return p;
    }

    bool zoom(Point lo, Point hi, Point& out) {
        for (std::size_t j = 0; j < o_.max_line_search && evals_ < o_.max_evals; ++j) {
            const double a = lo.alpha, b = hi.alpha;
            const double width = std::abs(b - a);
            if (width <= 1e-16 * std::max(1.0, std::abs(a))) break;
            double t = std::isfinite(hi.f) && std::isfinite(hi.d) ? cubic_min(a, lo.f, lo.d, b, hi.f, hi.d)
                                                                   : std::nan("");
            const double lo_b = std::min(a, b) + 0.1 * width, hi_b = std::max(a, b) - 0.1 * width;
            if (!std::isfinite(t) || t < lo_b || t > hi_b) t = 0.5 * (a + b);
            Point cur = eval(t);
            if (!std::isfinite(cur.f) || cur.f > f0_ + o_.c1 * t * dphi0_ || cur.f >= lo.f) {
                hi = std::move(cur);
            } else {
                if (std::abs(cur.d) <= -o_.c2 * dphi0_) {
                    out = std::move(cur);
                    return true;
                }
                if (cur.d * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(cur);
            }
        }
        return fallback(out);
    }

    bool fallback(Point& out) {
        if (best_.alpha > 0.0 && best_.f < f0_) {
            out = best_;
            return true;
        }
        return false;
    }

    const Objective& f_;
    const LbfgsOptions& o_;
    std::size_t& evals_;
    const Vec* x0_ = nullptr;
    const Vec* dir_ = nullptr;
    double f0_ = 0.0, dphi0_ = 0.0;
    Point best_;
};

}  // namespace

std::string to_string(LbfgsStatus s) {
    switch (s) {
        case LbfgsStatus::gradient_converged: return "gradient_converged";
        case LbfgsStatus::function_converged: return "function_converged";
        case LbfgsStatus::max_evals: return "max_evals";
        case LbfgsStatus::line_search_stalled: return "line_search_stalled";
        case LbfgsStatus::non_finite_start: return "non_finite_start";
    }
    return "unknown";
}

LbfgsResult lbfgs_minimize(const Objective& f, Vec x0, const LbfgsOptions& opts) {
    LbfgsResult res;
    res.x = std::move(x0);
    Vec g(res.x.size(), 0.0);
    res.f = f(res.x, &g);
    res.evals = 1;
    if (!std::isfinite(res.f) || !finite(g)) {
        res.status = LbfgsStatus::non_finite_start;
        return res;
    }
    res.grad_norm = max_norm(g);

    std::deque<Vec> S, Y;
    std::deque<double> rho;
    LineSearch ls(f, opts, res.evals);
    const std::size_t n = res.x.size();

    while (true) {
        if (res.grad_norm <= opts.grad_tol) {
            res.status = LbfgsStatus::gradient_converged;
            return res;
        }
        if (res.evals >= opts.max_evals) {
            res.status = LbfgsStatus::max_evals;
            return res;
        }

        // Two-loop recursion for d = -H g.
        Vec q = g;
        std::vector<double> alpha(S.size());
        for (std::size_t k = S.size(); k-- > 0;) {
            alpha[k] = rho[k] * dot(S[k], q);
            for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * Y[k][i];
        }
        const double gamma0 = S.empty() ? 1.0 : dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
        for (double& v : q) v *= gamma0;
        for (std::size_t k = 0; k < S.size(); ++k) {
            const double beta = rho[k] * dot(Y[k], q);
            for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * S[k][i];
        }
        Vec dir(n);
        for (std::size_t i = 0; i < n; ++i) dir[i] = -q[i];
        double dphi0 = dot(g, dir);
        if (!(dphi0 < 0.0)) {
            // Lost descent; restart from steepest descent.
            S.clear();
            Y.clear();
            rho.clear();
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            dphi0 = dot(g, dir);
        }
        const double alpha0 = S.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;

        Point next;
        if (!ls.run(res.x, res.f, dir, dphi0, alpha0, next)) {
            res.status = res.evals >= opts.max_evals ? LbfgsStatus::max_evals : LbfgsStatus::line_search_stalled;
            return res;
        }
        Vec s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = next.x[i] - res.x[i];
            y[i] = next.g[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            S.push_back(std::move(s));
            Y.push_back(std::move(y));
            rho.push_back(1.0 / sy);
            if (S.size() > opts.memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        const double decrease = res.f - next.f;
        const double scale = std::max({std::abs(res.f), std::abs(next.f), 1.0});
        res.x = std::move(next.x);
        res.f = next.f;
        g = std::move(next.g);
        res.grad_norm = max_norm(g);
        ++res.iterations;
        if (opts.f_rel_tol > 0.0 && decrease <= opts.f_rel_tol * scale && res.grad_norm > opts.grad_tol) {
            res.status = LbfgsStatus::function_converged;
            return res;
        }
    }
}

Objective central_difference(std::function<double(const std::vector<double>&)> value, double h) {
    return [value = std::move(value), h](const Vec& x, Vec* grad) {
        const double f0 = value(x);
        if (grad) {
            grad->assign(x.size(), 0.0);
            Vec xp = x;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double xi = x[i];
                xp[i] = xi + h;
                const double fp = value(xp);
                xp[i] = xi - h;
                const double fm = value(xp);
                xp[i] = xi;
                (*grad)[i] = (fp - fm) / (2.0 * h);
            }
        }
        return f0;
    };
}

}  // namespace fde
