#include "glow/stopping.hpp"

#include <cmath>
#include <cstdio>

namespace glow {

InnerStop inner_stop(const std::vector<double>& B, const std::vector<double>& D, double eta) {
    if (B.empty() || B.size() != D.size())
        throw ConfigError("norm histories must be non-empty and equally long");
    const std::size_t i = B.size();
    if (i >= 2 && (B[i - 1] >= B[i - 2] || D[i - 1] >= D[i - 2])) return InnerStop::StopRollback;
    if (B[i - 1] <= eta || D[i - 1] <= eta) return InnerStop::StopKeep;
    return InnerStop::Continue;
}

namespace {

double gamma_l2_impl(const Grid3& g, const ScalarField& F, const std::vector<double>* plane) {
    if (F.nx != g.nx || F.ny != g.ny || F.nz != g.nz)
        throw ConfigError("field shape does not match the grid");
    if (plane && plane->size() != std::size_t(g.nx) * g.ny)
        throw ConfigError("plane does not cover the grid lattice");
    double acc = 0.0;
    for (int j = g.j0; j <= g.j1; ++j) {
        const double wj = (j == g.j0 || j == g.j1) ? 0.5 : 1.0;
        for (int i = g.i0; i <= g.i1; ++i) {
            const double wi = (i == g.i0 || i == g.i1) ? 0.5 : 1.0;
            double d = F.at(i, j, g.k1);
            if (plane) d -= (*plane)[std::size_t(j) * g.nx + i];
            acc += wi * wj * d * d;
        }
    }
    return std::sqrt(acc * g.hx * g.hy);
}

}  // namespace

double gamma_l2(const Grid3& g, const ScalarField& F) { return gamma_l2_impl(g, F, nullptr); }

double gamma_l2(const Grid3& g, const ScalarField& F, const std::vector<double>& plane) {
    return gamma_l2_impl(g, F, &plane);
}

double omega_max(const Grid3& g, const ScalarField& F) {
    double m = -HUGE_VAL;
    for (int k = g.k0; k <= g.k1; ++k)
        for (int j = g.j0; j <= g.j1; ++j)
            for (int i = g.i0; i <= g.i1; ++i) m = std::max(m, F.at(i, j, k));
    return m;
}

std::optional<int> first_min(const std::vector<double>& D) {
    for (std::size_t n = 0; n + 1 < D.size(); ++n)
        if (D[n + 1] >= D[n]) return int(n);
    return std::nullopt;
}

std::optional<int> first_min_or_stab(const std::vector<double>& D) {
    for (std::size_t n = 0; n + 1 < D.size(); ++n) {
        if (D[n + 1] >= D[n]) return int(n);
        if (n >= 1 && std::abs(D[n + 1] - D[n]) / std::abs(D[n]) < 0.01 &&
            std::abs(D[n] - D[n - 1]) / std::abs(D[n - 1]) < 0.01)
            return int(n);
    }
    return std::nullopt;
}

SelectionResult classify_and_select(const Grid3& g, const std::vector<double>& D0,
                                    const std::vector<double>& Dm,
                                    const std::vector<ScalarField>& snaps) {
    const int N = int(D0.size());
    if (N < 1 || Dm.size() != D0.size() || snaps.size() != D0.size())
        throw ConfigError("norm histories and snapshots must cover the same intervals");
    SelectionResult r;
    auto nb = first_min(D0);
    auto mb = first_min_or_stab(Dm);
    if (!nb) {
        nb = N - 1;
        r.warned = true;
    }
    if (!mb) {
        mb = N - 1;
        r.warned = true;
    }
    const int nbar = *nb, mbar = *mb;
    r.Nbar = nbar + 1;
    r.Mbar = mbar + 1;
    const int pick0 = (mbar < nbar) ? mbar : nbar;
    r.pick = pick0 + 1;
    r.eps_tilde = omega_max(g, snaps[pick0]);
    if (r.eps_tilde < 5.0 || r.eps_tilde > 10.0) {
        r.cls = (r.eps_tilde < 5.0) ? TargetClass::Dielectric : TargetClass::Metallic;
        r.field = snaps[pick0];
        r.eps_comp = r.eps_tilde;
    } else {
        r.retried = true;
        const int lo = std::min(nbar + 1, N - 1);
        int nt = lo;
        for (int n = lo + 1; n < N; ++n)
            if (Dm[n] < Dm[nt]) nt = n;
        r.Ntilde = nt + 1;
        r.field = snaps[nt];
        r.eps_comp = omega_max(g, r.field);
        r.cls = (r.eps_comp > 10.0) ? TargetClass::Metallic : TargetClass::Dielectric;
    }
    r.n_comp = std::sqrt(r.eps_comp);
    return r;
}

const char* class_name(TargetClass c) {
    return c == TargetClass::Metallic ? "metallic" : "dielectric";
}

void write_norms_csv(const std::string& path, const std::vector<double>& D0,
                     const std::vector<double>& Dm) {
    if (D0.size() != Dm.size()) throw ConfigError("norm histories must be equally long");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw RuntimeError("cannot write " + path);
    std::fprintf(f, "n,D_n0,D_nm\n");
    for (std::size_t n = 0; n < D0.size(); ++n)
        std::fprintf(f, "%zu,%.17g,%.17g\n", n + 1, D0[n], Dm[n]);
    std::fclose(f);
}

}  // namespace glow
