#include "slabrad/fitting.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace slabrad {

namespace {

double uniform_step(const std::vector<double>& t) {
    if (t.size() < 4) throw InvalidParameter("need at least 4 samples to fit");
    const double h = (t.back() - t.front()) / (t.size() - 1);
    if (!(h > 0.0)) throw InvalidParameter("sample times must be increasing");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs(t[i] - t[i - 1] - h) > 1e-6 * h) throw InvalidParameter("samples must be uniformly spaced");
    return h;
}

CVector pencil_frequencies(const CVector& y, double h, int k) {
    const int n = static_cast<int>(y.size());
    const int lp = std::max(k, std::min(n / 3, 40));
    if (n - lp < k || lp < k) throw InvalidParameter("too few samples for the requested number of terms");
    CMatrix hank(n - lp, lp + 1);
    for (int i = 0; i < n - lp; ++i)
        for (int j = 0; j <= lp; ++j) hank(i, j) = y(i + j);
    Eigen::JacobiSVD<CMatrix> svd(hank, Eigen::ComputeThinV);
    const CMatrix w = svd.matrixV().leftCols(k).conjugate();
    const CMatrix w1 = w.topRows(lp);
    const CMatrix w2 = w.bottomRows(lp);
    const CMatrix shift = w1.completeOrthogonalDecomposition().solve(w2);
    Eigen::ComplexEigenSolver<CMatrix> es(shift);
    CVector omega(k);
    for (int i = 0; i < k; ++i) omega(i) = kI * std::log(es.eigenvalues()(i)) / h;
    return omega;
}

CMatrix basis(const CVector& omega, const Eigen::VectorXd& tau) {
    CMatrix b(tau.size(), omega.size());
    for (Eigen::Index i = 0; i < tau.size(); ++i)
        for (Eigen::Index k = 0; k < omega.size(); ++k) b(i, k) = std::exp(-kI * omega(k) * tau(i));
    return b;
}

}  // namespace

std::vector<RateFit> extract_rates(const std::vector<double>& times, const std::vector<cplx>& samples,
                                   const FitOptions& opts) {
    if (times.size() != samples.size()) throw InvalidParameter("times and samples differ in length");
    const double h = uniform_step(times);
    const int k = opts.n_terms;
    if (k < 1) throw InvalidParameter("n_terms must be >= 1");
    const int n = static_cast<int>(samples.size());
    if (n < 4 * k) throw InvalidParameter("too few samples for the requested number of terms");
    CVector y(n);
    Eigen::VectorXd tau(n);
    for (int i = 0; i < n; ++i) {
        y(i) = samples[i];
        tau(i) = times[i] - times.front();
    }

    CVector omega = pencil_frequencies(y, h, k);
    CVector amp = basis(omega, tau).completeOrthogonalDecomposition().solve(y);

    auto residual = [&](const CVector& a, const CVector& w) { return CVector(y - basis(w, tau) * a); };
    auto jacobian = [&](const CVector& a, const CVector& w) {
        const CMatrix b = basis(w, tau);
        CMatrix j(n, 2 * k);
        for (int m = 0; m < k; ++m) {
            j.col(m) = b.col(m);
            j.col(k + m) = (-kI * a(m)) * (tau.cast<cplx>().cwiseProduct(b.col(m)));
        }
        return j;
    };

    CVector r = residual(amp, omega);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const CMatrix j = jacobian(amp, omega);
        const CMatrix jtj = j.adjoint() * j;
        const CVector grad = j.adjoint() * r;
        bool accepted = false;
        for (int tries = 0; tries < 20 && !accepted; ++tries) {
            CMatrix a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseAbs().cwiseMax(1e-300).cast<cplx>();
            const CVector step = a.ldlt().solve(grad);
            const CVector amp_new = amp + step.head(k);
            const CVector omega_new = omega + step.tail(k);
            const CVector r_new = residual(amp_new, omega_new);
            const double cost_new = r_new.squaredNorm();
            if (std::isfinite(cost_new) && cost_new <= cost) {
                const double gain = cost - cost_new;
                amp = amp_new;
                omega = omega_new;
                r = r_new;
                accepted = true;
                lambda = std::max(lambda * 0.3, 1e-12);
                if (gain <= 1e-15 * cost || cost_new == 0.0) it = opts.max_iterations;
                cost = cost_new;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) break;
    }

    const CMatrix j = jacobian(amp, omega);
    const double dof = std::max(1, n - 2 * k);
    const double sigma2 = cost / dof;
    const CMatrix cov = sigma2 * (j.adjoint() * j).completeOrthogonalDecomposition().pseudoInverse();
    const double span = times.back() - times.front();

    std::vector<RateFit> out;
    for (int m = 0; m < k; ++m) {
        RateFit f;
        f.omega = omega(m).real();
        f.gamma = -omega(m).imag();
        f.amplitude = amp(m);
        const double var = std::abs(cov(k + m, k + m).real());
        f.sigma_gamma = std::sqrt(0.5 * var);
        f.sigma_omega = std::sqrt(0.5 * var);
        if (!(f.gamma > 0.0) || f.gamma * span < opts.min_decay_fraction ||
            f.sigma_gamma > opts.max_relative_sigma * f.gamma)
            throw ResolutionError(fmt::format(
                "decay rate {:.3e} (sigma {:.1e}) is not resolved by a trace spanning {:.3e}; lengthen the run "
                "and enlarge the bath box length L",
                f.gamma, f.sigma_gamma, span));
        out.push_back(f);
    }
    std::sort(out.begin(), out.end(),
              [](const RateFit& a, const RateFit& b) { return std::abs(a.amplitude) > std::abs(b.amplitude); });
    return out;
}

std::vector<RateFit> extract_rates(const std::vector<double>& times, const std::vector<double>& samples,
                                   const FitOptions& opts) {
    std::vector<cplx> c(samples.begin(), samples.end());
    return extract_rates(times, c, opts);
}

double log_linear_rate(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size()) throw InvalidParameter("times and values differ in length");
    double st = 0, sy = 0, stt = 0, sty = 0;
    int n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (values[i] == 0.0) continue;
        const double ly = std::log(std::abs(values[i]));
        st += times[i];
        sy += ly;
        stt += times[i] * times[i];
        sty += times[i] * ly;
        ++n;
    }
    if (n < 2) throw InvalidParameter("need at least two nonzero samples");
    const double det = n * stt - st * st;
    if (!(det > 0.0)) throw InvalidParameter("degenerate sample times");
    return -(n * sty - st * sy) / det;
}

}  // namespace slabrad
