#include "glow/forward.hpp"

#include <algorithm>
#include <sstream>

namespace glow {

double SourcePulse::f(double t) const {
    if (t <= 0.0 || t > t1()) return 0.0;
    return std::sin(omega * t);
}

double TimeSteppingPlan::cfl_ratio(const Grid3& g) const {
    return tau * std::sqrt(1.0 / (g.hx * g.hx) + 1.0 / (g.hy * g.hy) + 1.0 / (g.hz * g.hz));
}

namespace {

void validate_inputs(const Grid3& g, const ScalarField& eps, const TimeSteppingPlan& plan,
                     const std::vector<double>& svals, int record_k) {
    if (!(plan.tau > 0.0) || !(plan.T > 0.0) || plan.steps() < 1)
        throw ConfigError("time stepping needs tau > 0, T > 0 and at least one step");
    const double r = plan.cfl_ratio(g);
    if (!(r <= 1.0)) {
        std::ostringstream os;
        os << "unstable time step, CFL ratio tau*sqrt(1/hx^2+1/hy^2+1/hz^2) = " << r << " > 1";
        throw ConfigError(os.str());
    }
    if (eps.nx != g.nx || eps.ny != g.ny || eps.nz != g.nz)
        throw ConfigError("permittivity field shape does not match the grid");
    for (std::size_t n = 0; n < eps.v.size(); ++n) {
        const double e = eps.v[n];
        if (!std::isfinite(e) || e < 1.0 - 1e-12 || e > 15.0 + 1e-12) {
            std::ostringstream os;
            os << "permittivity value " << e << " at node " << n << " outside [1, 15]";
            throw ConfigError(os.str());
        }
    }
    for (double s : svals)
        if (!std::isfinite(s) || s <= 0.0)
            throw ConfigError("pseudo-frequency values must be positive");
    if (record_k < -1 || record_k >= g.nz)
        throw ConfigError("record plane index outside the grid");
}

}  // namespace

ForwardResult detail::run_unchecked(const Grid3& g, const ScalarField& eps,
                                    const SourcePulse& pulse, const TimeSteppingPlan& plan,
                                    const std::vector<double>& svals, int record_k) {
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const std::size_t nn = g.nn();
    const std::size_t sy = std::size_t(nx);
    const std::size_t sz = std::size_t(nx) * ny;
    const int nt = plan.steps();
    const double tau = plan.tau;
    const double ax = tau * tau / (g.hx * g.hx);
    const double ay = tau * tau / (g.hy * g.hy);
    const double az = tau * tau / (g.hz * g.hz);
    const double coefz = (g.hz - tau) / (g.hz + tau);
    const double hz = g.hz;

    std::vector<double> u0(nn, 0.0), u1(nn, 0.0), u2(nn, 0.0);

    ForwardResult out;
    out.W.reserve(svals.size());
    for (std::size_t si = 0; si < svals.size(); ++si) out.W.emplace_back(g, 0.0);
    if (record_k >= 0) {
        TraceSet& tr = out.trace;
        tr.axis = 2;
        tr.coord = g.z(record_k);
        tr.nx = nx;
        tr.ny = ny;
        tr.hx = g.hx;
        tr.hy = g.hy;
        tr.ox = g.ox;
        tr.oy = g.oy;
        tr.tau = tau;
        tr.nsteps = nt;
        tr.v.assign(std::size_t(nt + 1) * nx * ny, 0.0);  // row 0: zero initial state
    }

    for (int m = 0; m < nt; ++m) {
        const double tm = m * tau;
        const double tn = tm + tau;

        // interior update (face values are provisional and overwritten below)
#pragma omp parallel for schedule(static)
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                const std::size_t row = sy * j + sz * k;
                for (int i = 0; i < nx; ++i) {
                    const std::size_t n = row + i;
                    double lap = 0.0;
                    if (i >= 1 && i <= nx - 2)
                        lap += ax * (u1[n + 1] - 2.0 * u1[n] + u1[n - 1]);
                    if (j >= 1 && j <= ny - 2)
                        lap += ay * (u1[n + sy] - 2.0 * u1[n] + u1[n - sy]);
                    if (k >= 1 && k <= nz - 2)
                        lap += az * (u1[n + sz] - 2.0 * u1[n] + u1[n - sz]);
                    u2[n] = 2.0 * u1[n] - u0[n] + lap / eps.v[n];
                }
            }
        }

        // x faces: zero-Neumann mirrors
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j) {
                const std::size_t row = sy * j + sz * k;
                u2[row] = u2[row + 1];
                u2[row + nx - 1] = u2[row + nx - 2];
            }
        // y faces: zero-Neumann mirrors (overwrite the shared edges)
        for (int k = 0; k < nz; ++k) {
            const std::size_t p0 = sz * k, p1 = sz * k + sy * (ny - 1);
            for (int i = 0; i < nx; ++i) {
                u2[p0 + i] = u2[p0 + sy + i];
                u2[p1 + i] = u2[p1 - sy + i];
            }
        }
        // back z face: first-order absorbing update of the full field
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t n = sy * j + i;
                u2[n] = u1[n + sz] + coefz * (u1[n] - u2[n + sz]);
            }
        // front z face: incident plane wave plus absorbing update of the remainder
        {
            const double fK_m = pulse.f(tm);        // incident at z=zf, old time
            const double fK1_m = pulse.f(tm - hz);  // incident at z=zf-hz, old time
            const double fK1_n = pulse.f(tn - hz);
            const double fK_n = pulse.f(tn);
            const std::size_t off = sz * (nz - 1);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const std::size_t n = sy * j + i;
                    const double sK = u1[off + n] - fK_m;
                    const double sK1 = u1[off - sz + n] - fK1_m;
                    const double sK1n = u2[off - sz + n] - fK1_n;
                    u2[off + n] = sK1 + coefz * (sK - sK1n) + fK_n;
                }
        }

        double chk = 0.0;
        for (std::size_t n = 0; n < nn; ++n) chk += u2[n];
        if (!std::isfinite(chk)) {
            std::ostringstream os;
            os << "forward stepping diverged: non-finite field at step " << (m + 1) << " (t="
               << tn << ")";
            throw RuntimeError(os.str());
        }

        if (record_k >= 0) {
            double* dst = out.trace.v.data() + std::size_t(m + 1) * nx * ny;
            const double* src = u2.data() + sz * record_k;
            std::copy(src, src + sz, dst);
        }
        const double wgt = (m == nt - 1) ? 0.5 : 1.0;
        for (std::size_t si = 0; si < svals.size(); ++si) {
            const double wfac = wgt * tau * std::exp(-svals[si] * tn);
            double* Wv = out.W[si].v.data();
#pragma omp parallel for schedule(static)
            for (long long n = 0; n < (long long)nn; ++n) Wv[n] += wfac * u2[n];
        }

        u0.swap(u1);
        u1.swap(u2);
    }
    return out;
}

ForwardResult solve_forward(const Grid3& g, const ScalarField& eps, const SourcePulse& pulse,
                            const TimeSteppingPlan& plan, const std::vector<double>& svals,
                            int record_k) {
    validate_inputs(g, eps, plan, svals, record_k);
    return detail::run_unchecked(g, eps, pulse, plan, svals, record_k);
}

double analytic_w0(const double x[3], const double x0[3], double s) {
    const double dx = x[0] - x0[0], dy = x[1] - x0[1], dz = x[2] - x0[2];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r < 1e-14) throw ConfigError("point-source solution is singular at the source");
    return std::exp(-s * r) / (4.0 * M_PI * r);
}

double pulse_transform(double s, double omega) {
    return omega * (1.0 - std::exp(-2.0 * M_PI * s / omega)) / (s * s + omega * omega);
}

double analytic_plane_wave_w(double z, double s, const SourcePulse& pulse, double z_front) {
    return std::exp(-s * (z_front - z)) * pulse_transform(s, pulse.omega);
}

}  // namespace glow
