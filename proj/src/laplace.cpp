#include "glow/laplace.hpp"

#include <cmath>
#include <sstream>

namespace glow {

Ladder make_ladder(double smin, double smax, double step) {
    if (!(smin > 0.0) || !(smax > smin) || !(step > 0.0))
        throw ConfigError("pseudo-frequency ladder needs 0 < smin < smax and step > 0");
    const double n = (smax - smin) / step;
    const int N = int(std::lround(n));
    if (N < 1 || std::abs(n - N) > 1e-9)
        throw ConfigError("ladder step must divide the pseudo-frequency range");
    Ladder lad;
    lad.smin = smin;
    lad.smax = smax;
    lad.step = step;
    lad.count = N + 1;
    if (std::abs(lad.s(N) - smin) > 1e-12)
        throw ConfigError("ladder does not terminate at smin");
    return lad;
}

std::vector<double> laplace_transform(const TraceSet& trace, double s) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw ConfigError("pseudo-frequency must be positive");
    if (trace.nsteps < 1 || trace.nx < 1 || trace.ny < 1 || !(trace.tau > 0.0))
        throw ConfigError("empty trace");
    const double T = trace.tau * trace.nsteps;
    if (!(std::exp(-s * T) < 1e-3)) {
        std::ostringstream os;
        os << "record too short for s=" << s << ": exp(-s*T)=" << std::exp(-s * T)
           << " exceeds the 1e-3 truncation bound";
        throw ConfigError(os.str());
    }
    const std::size_t np = std::size_t(trace.nx) * trace.ny;
    std::vector<double> out(np, 0.0);
    for (int m = 0; m < trace.nsamp(); ++m) {
        double w = trace.tau * std::exp(-s * trace.t(m));
        if (m == 0 || m == trace.nsamp() - 1) w *= 0.5;
        const double* row = trace.v.data() + std::size_t(m) * np;
        for (std::size_t p = 0; p < np; ++p) out[p] += w * row[p];
    }
    return out;
}

std::vector<double> observed_tail(const std::vector<double>& w_plane, double s) {
    if (!(s > 0.0)) throw ConfigError("pseudo-frequency must be positive");
    std::vector<double> out(w_plane.size());
    const double s2 = s * s;
    for (std::size_t p = 0; p < w_plane.size(); ++p) {
        if (!(w_plane[p] > 0.0)) {
            std::ostringstream os;
            os << "non-positive transform value " << w_plane[p] << " at plane node " << p;
            throw RuntimeError(os.str());
        }
        out[p] = std::log(w_plane[p]) / s2;
    }
    return out;
}

namespace {

// d/ds of ln(w) at ladder index n; ladder values descend, so index n-1 is at
// larger s and the centered stencil is (ln w[n-1] - ln w[n+1]) / (2*step).
double dlog_ds(double lo, double mid, double hi, int n, int last, double step) {
    if (n == 0) return (mid - hi) / step;          // mid = ln w[0], hi = ln w[1]
    if (n == last) return (lo - mid) / step;       // lo = ln w[last-1]
    return (lo - hi) / (2.0 * step);
}

double checked_log(double w, int n, std::size_t p) {
    if (!(w > 0.0)) {
        std::ostringstream os;
        os << "non-positive transform value " << w << " at ladder index " << n << ", node " << p;
        throw RuntimeError(os.str());
    }
    return std::log(w);
}

}  // namespace

VQPlanes compute_v_q_boundary(const LadderPlanes& w, int n) {
    const int last = w.count - 1;
    if (n < 0 || n > last) throw ConfigError("ladder index out of range");
    if (w.count < 2) throw ConfigError("the s-derivative needs at least two ladder planes");
    const std::size_t np = std::size_t(w.nx) * w.ny;
    const double s = w.s(n), s2 = s * s, s3 = s2 * s;
    VQPlanes out;
    out.v.resize(np);
    out.q.resize(np);
    const double* mid = w.plane(n);
    const double* lo = w.plane(n > 0 ? n - 1 : n);
    const double* hi = w.plane(n < last ? n + 1 : n);
    for (std::size_t p = 0; p < np; ++p) {
        const double lm = checked_log(mid[p], n, p);
        const double ll = (n > 0) ? checked_log(lo[p], n - 1, p) : lm;
        const double lh = (n < last) ? checked_log(hi[p], n + 1, p) : lm;
        const double d = dlog_ds(ll, lm, lh, n, last, w.step);
        out.v[p] = lm / s2;
        out.q[p] = d / s2 - 2.0 * lm / s3;
    }
    return out;
}

LadderPlanes psi_planes(const LadderPlanes& w) {
    LadderPlanes out = w;
    for (int n = 0; n < w.count; ++n) {
        VQPlanes vq = compute_v_q_boundary(w, n);
        std::copy(vq.q.begin(), vq.q.end(), out.plane(n));
    }
    return out;
}

std::vector<ScalarField> psi_fields(const std::vector<ScalarField>& w, const Ladder& lad) {
    if (int(w.size()) != lad.count)
        throw ConfigError("transform stack does not match the ladder");
    const int last = lad.count - 1;
    std::vector<ScalarField> out;
    out.reserve(w.size());
    std::vector<double> lnw;
    for (int n = 0; n <= last; ++n) {
        const ScalarField& mid = w[n];
        if (!mid.same_shape(w[0])) throw ConfigError("transform stack shape mismatch");
        const ScalarField& lo = w[n > 0 ? n - 1 : n];
        const ScalarField& hi = w[n < last ? n + 1 : n];
        const double s = lad.s(n), s2 = s * s, s3 = s2 * s;
        ScalarField q(mid.nx, mid.ny, mid.nz, 0.0);
        for (std::size_t p = 0; p < mid.v.size(); ++p) {
            const double lm = checked_log(mid.v[p], n, p);
            const double ll = (n > 0) ? checked_log(lo.v[p], n - 1, p) : lm;
            const double lh = (n < last) ? checked_log(hi.v[p], n + 1, p) : lm;
            const double d = dlog_ds(ll, lm, lh, n, last, lad.step);
            q.v[p] = d / s2 - 2.0 * lm / s3;
        }
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<ScalarField> assemble_boundary_data(const std::vector<ScalarField>& psi0,
                                                const LadderPlanes& psi_gamma, const Grid3& g) {
    if (int(psi0.size()) != psi_gamma.count)
        throw ConfigError("model and measured stacks cover different ladders");
    if (psi_gamma.nx != g.nx || psi_gamma.ny != g.ny)
        throw ConfigError("measured planes do not cover the grid lattice");
    std::vector<ScalarField> psi = psi0;
    for (int n = 0; n < psi_gamma.count; ++n) {
        ScalarField& f = psi[n];
        if (f.nx != g.nx || f.ny != g.ny || f.nz != g.nz)
            throw ConfigError("model stack does not match the grid");
        for (int j = g.j0; j <= g.j1; ++j)
            for (int i = g.i0; i <= g.i1; ++i) f.at(i, j, g.k1) = psi_gamma.at(n, i, j);
        for (int k = g.k0; k <= g.k1; ++k)
            for (int j = g.j0; j <= g.j1; ++j)
                for (int i = g.i0; i <= g.i1; ++i) {
                    if (!g.on_omega_boundary(i, j, k)) continue;
                    if (!std::isfinite(f.at(i, j, k))) {
                        std::ostringstream os;
                        os << "non-finite Dirichlet value at boundary node (" << i << "," << j
                           << "," << k << "), ladder index " << n;
                        throw RuntimeError(os.str());
                    }
                }
    }
    return psi;
}

}  // namespace glow
