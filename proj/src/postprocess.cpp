#include "glow/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace glow {

ThresholdResult threshold_and_box(const Grid3& g, const ScalarField& eps) {
    if (eps.nx != g.nx || eps.ny != g.ny || eps.nz != g.nz)
        throw ConfigError("field shape does not match the grid");
    ThresholdResult r{eps, false};
    const double mx = omega_max(g, eps);
    if (mx <= 1.0) {
        r.empty = true;
        return r;
    }
    const double cut = 0.5 * mx;
    int ilo = g.nx, ihi = -1, jlo = g.ny, jhi = -1;
    for (int k = g.k0; k <= g.k1; ++k)
        for (int j = g.j0; j <= g.j1; ++j)
            for (int i = g.i0; i <= g.i1; ++i) {
                const double e = eps.at(i, j, k);
                if (e > cut && e > 1.0) {
                    ilo = std::min(ilo, i);
                    ihi = std::max(ihi, i);
                    jlo = std::min(jlo, j);
                    jhi = std::max(jhi, j);
                }
            }
    if (ihi < 0) {
        r.field = ScalarField(g, 1.0);
        r.empty = true;
        return r;
    }
    // survivors keep their value; everything else, and everything outside the
    // (x, y) box (all z), resets to background
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double& x = r.field.v[r.field.idx(i, j, k)];
                const bool inbox = i >= ilo && i <= ihi && j >= jlo && j <= jhi;
                if (!(inbox && x > cut)) x = 1.0;
            }
    return r;
}

StageTwoResult stage_two(const Grid3& g, const LadderPlanes& Wdata_gamma,
                         const std::vector<ScalarField>& W0_all, const DriverConfig& cfg,
                         const std::vector<int>& mns, const SelectionResult& sel) {
    const Ladder& lad = cfg.ladder;
    const int N = lad.intervals();
    if (int(mns.size()) != N) throw ConfigError("iteration counts do not cover the ladder");
    if (Wdata_gamma.count != lad.count || int(W0_all.size()) != lad.count)
        throw ConfigError("data stacks do not cover the ladder");
    if (Wdata_gamma.nx != g.nx || Wdata_gamma.ny != g.ny)
        throw ConfigError("measured planes do not cover the grid lattice");
    const int pick0 = sel.retried ? sel.Ntilde - 1 : sel.pick - 1;
    if (pick0 < 0 || pick0 >= N) throw ConfigError("selected interval outside the ladder");
    const double hs = lad.step;

    const std::vector<ScalarField> psi0 = psi_fields(W0_all, lad);
    const LadderPlanes psit = psi_planes(Wdata_gamma);
    const std::vector<ScalarField> psi = assemble_boundary_data(psi0, psit, g);

    FemSystem fem(g);
    FemSystem femR(g, enlarged_box(g, 1));

    const double sbar = lad.s(0);
    ScalarField V = initial_tail(fem, psi[0], sbar);
    ScalarField qsum(g, 0.0);
    ScalarField eps_cur(g, 1.0);
    ScalarField gqx(g), gqy(g), gqz(g), gVx(g), gVy(g), gVz(g);

    // The image is the interval-start state of the selected rung, so only the
    // intervals before it need replaying. Inner counts are fixed (no norm
    // tests, no rollback) and every update passes through threshold_and_box.
    for (int n = 1; n <= pick0; ++n) {
        const double s_n = lad.s(n);
        ScalarField psi_n = psi[n - 1];
        for (std::size_t p = 0; p < psi_n.v.size(); ++p)
            psi_n.v[p] = 0.5 * (psi_n.v[p] + psi[n].v[p]);
        const CwfCoeffs cf = derive_coeffs(lad, n, cfg.mu);
        const int reps = std::max(1, mns[n - 1]);
        ScalarField q;
        try {
            for (int i = 1; i <= reps; ++i) {
                grad_field(g, qsum, gqx, gqy, gqz);
                grad_field(g, V, gVx, gVy, gVz);
                ScalarField cx = gqx, cy = gqy, cz = gqz;
                for (std::size_t p = 0; p < cx.v.size(); ++p) {
                    cx.v[p] -= gVx.v[p];
                    cy.v[p] -= gVy.v[p];
                    cz.v[p] -= gVz.v[p];
                }
                q = fem.solve_q_equation(cx, cy, cz, cf.A1, cf.A2, psi_n);
                ScalarField w(g, 0.0);
                for (std::size_t p = 0; p < w.v.size(); ++p) {
                    const double vv = -hs * q.v[p] - qsum.v[p] + V.v[p];
                    w.v[p] = std::exp(s_n * s_n * vv);
                }
                const ScalarField epsR = femR.recover_epsilon(w, s_n);
                ScalarField eps_new(g, 1.0);
                for (int kk = g.k0; kk <= g.k1; ++kk)
                    for (int jj = g.j0; jj <= g.j1; ++jj)
                        for (int ii = g.i0; ii <= g.i1; ++ii)
                            eps_new.at(ii, jj, kk) = epsR.at(ii, jj, kk);
                eps_new = threshold_and_box(g, eps_new).field;

                ForwardResult fw = solve_forward(g, eps_new, cfg.pulse, cfg.plan, {s_n});
                const ScalarField& Wn = fw.W[0];
                for (std::size_t p = 0; p < V.v.size(); ++p)
                    V.v[p] = std::log(std::max(Wn.v[p], 1e-300)) / (s_n * s_n);
                eps_cur = std::move(eps_new);
            }
        } catch (const RuntimeError& e) {
            std::ostringstream os;
            os << "shape refinement, interval " << n << " (s=" << s_n << "): " << e.what();
            throw RuntimeError(os.str());
        }
        for (std::size_t p = 0; p < qsum.v.size(); ++p) qsum.v[p] += hs * q.v[p];
    }

    StageTwoResult out;
    out.image = std::move(eps_cur);
    const double mx = omega_max(g, out.image);
    out.max_eps = mx;
    const double keep = 0.9 * mx;
    for (double& x : out.image.v)
        if (!(x >= keep)) x = 1.0;

    out.ix0 = g.nx;
    out.jy0 = g.ny;
    out.kz0 = g.nz;
    double si = 0.0, sj = 0.0;
    for (int k = g.k0; k <= g.k1; ++k)
        for (int j = g.j0; j <= g.j1; ++j)
            for (int i = g.i0; i <= g.i1; ++i)
                if (out.image.at(i, j, k) > 1.0) {
                    out.ix0 = std::min(out.ix0, i);
                    out.ix1 = std::max(out.ix1, i);
                    out.jy0 = std::min(out.jy0, j);
                    out.jy1 = std::max(out.jy1, j);
                    out.kz0 = std::min(out.kz0, k);
                    out.kz1 = std::max(out.kz1, k);
                    si += i;
                    sj += j;
                    ++out.support_count;
                }
    if (out.support_count == 0) {
        out.empty = true;
        out.ix0 = out.jy0 = out.kz0 = -1;
    } else {
        out.centroid_i = si / double(out.support_count);
        out.centroid_j = sj / double(out.support_count);
    }
    return out;
}

void write_vtk(const std::string& path, const Grid3& g, const ScalarField& f,
               const std::string& name) {
    if (f.nx != g.nx || f.ny != g.ny || f.nz != g.nz)
        throw ConfigError("field shape does not match the grid");
    std::ofstream os(path);
    if (!os) throw RuntimeError("cannot open " + path + " for writing");
    os << "# vtk DataFile Version 3.0\n" << name << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.nx << ' ' << g.ny << ' ' << g.nz << '\n';
    os.precision(12);
    os << "ORIGIN " << g.ox << ' ' << g.oy << ' ' << g.oz << '\n';
    os << "SPACING " << g.hx << ' ' << g.hy << ' ' << g.hz << '\n';
    os << "POINT_DATA " << f.v.size() << '\n';
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : f.v) os << x << '\n';  // storage order is already x-fastest
    if (!os) throw RuntimeError("failed writing " + path);
}

}  // namespace glow
