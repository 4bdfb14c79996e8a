#include "eaclutch/numerics/least_squares.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "eaclutch/errors.hpp"

namespace eaclutch {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

void check_finite(const Vec& r, const char* where) {
    if (!r.allFinite()) throw DegenerateFit(std::string("least squares: non-finite residual ") + where);
}

}  // namespace

FitResult fit_residuals(const ResidualFn& residuals, std::size_t m, std::vector<double> init,
                        std::vector<ParamBounds> bounds, const Tolerance& tol) {
    tol.validate();
    const std::size_t n = init.size();
    if (n == 0) throw DomainError("least squares: no parameters");
    if (m < n) throw DomainError("least squares: fewer residuals than parameters");
    if (bounds.empty()) bounds.assign(n, ParamBounds{});
    if (bounds.size() != n) throw DomainError("least squares: bounds size mismatch");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(bounds[j].lo <= bounds[j].hi)) throw DomainError("least squares: empty bound interval");
        if (init[j] < bounds[j].lo || init[j] > bounds[j].hi)
            throw DomainError("least squares: initial guess outside bounds");
    }

    FitResult out;
    Vec p = Eigen::Map<Vec>(init.data(), static_cast<Eigen::Index>(n));
    auto eval = [&](const Vec& q, Vec& r) {
        r.resize(static_cast<Eigen::Index>(m));
        residuals(std::span<const double>(q.data(), n), std::span<double>(r.data(), m));
    };
    auto clamp = [&](Vec& q) {
        bool hit = false;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = std::clamp(q[j], bounds[j].lo, bounds[j].hi);
            if (c != q[j]) hit = true;
            q[j] = c;
        }
        return hit;
    };
    auto jacobian = [&](const Vec& q, Mat& J) {
        J.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        Vec rp, rm;
        const double step = std::cbrt(std::numeric_limits<double>::epsilon());
        for (std::size_t j = 0; j < n; ++j) {
            // a parameter sitting at zero gets a unit scale
            const double h = step * (q[j] != 0.0 ? std::abs(q[j]) : 1.0);
            Vec qp = q, qm = q;
            qp[j] += h;
            qm[j] -= h;
            // stay inside the box: one-sided difference at a bound
            if (qp[j] > bounds[j].hi) qp[j] = q[j];
            if (qm[j] < bounds[j].lo) qm[j] = q[j];
            eval(qp, rp);
            eval(qm, rm);
            J.col(static_cast<Eigen::Index>(j)) = (rp - rm) / (qp[j] - qm[j]);
        }
        check_finite(J.reshaped(), "in Jacobian");
    };

    Vec r;
    eval(p, r);
    check_finite(r, "at the initial guess");
    double cost = 0.5 * r.squaredNorm();
    Mat J;
    jacobian(p, J);
    {
        Eigen::ColPivHouseholderQR<Mat> qr(J);
        if (qr.rank() < static_cast<Eigen::Index>(n)) throw DegenerateFit("least squares: singular Jacobian at the initial guess");
    }

    Vec diag = J.colwise().squaredNorm().transpose().cwiseMax(1e-300);
    double mu = 1e-3;
    double nu = 2.0;
    for (int iter = 0; iter < tol.max_iter; ++iter) {
        out.iterations = iter + 1;
        if (cost == 0.0) {
            out.converged = true;
            break;
        }
        diag = diag.cwiseMax(J.colwise().squaredNorm().transpose());
        const Vec g = J.transpose() * r;
        // augmented system [J; sqrt(mu) D] dp = [-r; 0]
        Mat A(static_cast<Eigen::Index>(m + n), static_cast<Eigen::Index>(n));
        A.topRows(static_cast<Eigen::Index>(m)) = J;
        A.bottomRows(static_cast<Eigen::Index>(n)) = (mu * diag).cwiseSqrt().asDiagonal();
        Vec rhs = Vec::Zero(static_cast<Eigen::Index>(m + n));
        rhs.head(static_cast<Eigen::Index>(m)) = -r;
        Vec dp = A.colPivHouseholderQr().solve(rhs);

        Vec pn = p + dp;
        const bool hit = clamp(pn);
        dp = pn - p;
        Vec rn;
        eval(pn, rn);
        const double cost_new = rn.allFinite() ? 0.5 * rn.squaredNorm() : std::numeric_limits<double>::infinity();
        const double predicted = -(g.dot(dp) + 0.5 * (J * dp).squaredNorm());
        const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;

        const bool step_small = dp.norm() <= tol.rel * (p.norm() + tol.rel);
        if (rho > 0.0 && cost_new <= cost) {
            p = pn;
            r = rn;
            const double rel_drop = (cost - cost_new) / std::max(cost, 1e-300);
            cost = cost_new;
            if (hit) out.clamped = true;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
            if (step_small || rel_drop < 1e-15) {
                out.converged = true;
                break;
            }
            jacobian(p, J);
        } else {
            if (step_small || g.lpNorm<Eigen::Infinity>() == 0.0) {
                out.converged = true;
                break;
            }
            mu *= nu;
            nu *= 2.0;
            if (mu > 1e30) {
                out.converged = true;  // no descent direction left at this precision
                break;
            }
        }
    }
    if (!out.converged) out.warnings.push_back("iteration limit reached");
    if (out.clamped) out.warnings.push_back("parameters clamped to bounds");

    jacobian(p, J);
    Eigen::ColPivHouseholderQR<Mat> qr(J);
    if (qr.rank() < static_cast<Eigen::Index>(n)) throw DegenerateFit("least squares: singular Jacobian at the solution");
    const double dof = static_cast<double>(m) - static_cast<double>(n);
    const double s2 = dof > 0 ? 2.0 * cost / dof : 0.0;
    const Mat cov = s2 * (J.transpose() * J).inverse();
    out.params.assign(p.data(), p.data() + n);
    out.std_errors.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        out.std_errors[j] = std::sqrt(std::max(0.0, cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j))));
    out.residual_norm = r.norm();
    return out;
}

FitResult fit_least_squares(const ScalarModel& model, std::span<const DataPoint> data, std::vector<double> init,
                            std::vector<ParamBounds> bounds, const Tolerance& tol) {
    if (data.size() < init.size()) throw DomainError("least squares: need at least as many points as parameters");
    auto res = [&](std::span<const double> q, std::span<double> out) {
        for (std::size_t i = 0; i < data.size(); ++i) out[i] = model(q, data[i].x) - data[i].y;
    };
    return fit_residuals(res, data.size(), std::move(init), std::move(bounds), tol);
}

}  // namespace eaclutch
