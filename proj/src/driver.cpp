#include "glow/driver.hpp"

#include <cmath>
#include <sstream>

namespace glow {

void grad_field(const Grid3& g, const ScalarField& F, ScalarField& gx, ScalarField& gy,
                ScalarField& gz) {
    if (F.nx != g.nx || F.ny != g.ny || F.nz != g.nz)
        throw ConfigError("field shape does not match the grid");
    if (!F.same_shape(gx) || !F.same_shape(gy) || !F.same_shape(gz))
        throw ConfigError("gradient output shape mismatch");
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t n = F.idx(i, j, k);
                double vx, vy, vz;
                if (i == 0)
                    vx = (-3.0 * F.at(0, j, k) + 4.0 * F.at(1, j, k) - F.at(2, j, k)) /
                         (2.0 * g.hx);
                else if (i == nx - 1)
                    vx = (3.0 * F.at(nx - 1, j, k) - 4.0 * F.at(nx - 2, j, k) +
                          F.at(nx - 3, j, k)) /
                         (2.0 * g.hx);
                else
                    vx = (F.at(i + 1, j, k) - F.at(i - 1, j, k)) / (2.0 * g.hx);
                if (j == 0)
                    vy = (-3.0 * F.at(i, 0, k) + 4.0 * F.at(i, 1, k) - F.at(i, 2, k)) /
                         (2.0 * g.hy);
                else if (j == ny - 1)
                    vy = (3.0 * F.at(i, ny - 1, k) - 4.0 * F.at(i, ny - 2, k) +
                          F.at(i, ny - 3, k)) /
                         (2.0 * g.hy);
                else
                    vy = (F.at(i, j + 1, k) - F.at(i, j - 1, k)) / (2.0 * g.hy);
                if (k == 0)
                    vz = (-3.0 * F.at(i, j, 0) + 4.0 * F.at(i, j, 1) - F.at(i, j, 2)) /
                         (2.0 * g.hz);
                else if (k == nz - 1)
                    vz = (3.0 * F.at(i, j, nz - 1) - 4.0 * F.at(i, j, nz - 2) +
                          F.at(i, j, nz - 3)) /
                         (2.0 * g.hz);
                else
                    vz = (F.at(i, j, k + 1) - F.at(i, j, k - 1)) / (2.0 * g.hz);
                gx.v[n] = vx;
                gy.v[n] = vy;
                gz.v[n] = vz;
            }
}

ScalarField initial_tail(const FemSystem& fem, const ScalarField& psi_sbar, double sbar) {
    if (!(sbar > 0.0)) throw ConfigError("pseudo-frequency must be positive");
    ScalarField b = psi_sbar;
    for (double& x : b.v) x *= -sbar * sbar;
    ScalarField p = fem.solve_dirichlet_laplace(b);
    for (double& x : p.v) x /= sbar;
    return p;
}

namespace {

double rel_change_omega(const Grid3& g, const ScalarField& a, const ScalarField& b) {
    double num = 0.0, den = 0.0;
    for (int k = g.k0; k <= g.k1; ++k)
        for (int j = g.j0; j <= g.j1; ++j)
            for (int i = g.i0; i <= g.i1; ++i) {
                const double d = a.at(i, j, k) - b.at(i, j, k);
                num += d * d;
                den += b.at(i, j, k) * b.at(i, j, k);
            }
    return std::sqrt(num) / std::sqrt(den);
}

}  // namespace

InversionResult run_ladder(const Grid3& g, const LadderPlanes& Wdata_gamma,
                           const std::vector<ScalarField>& W0_all, const DriverConfig& cfg) {
    const Ladder& lad = cfg.ladder;
    const int N = lad.intervals();
    if (Wdata_gamma.count != lad.count || int(W0_all.size()) != lad.count)
        throw ConfigError("data stacks do not cover the ladder");
    if (Wdata_gamma.nx != g.nx || Wdata_gamma.ny != g.ny)
        throw ConfigError("measured planes do not cover the grid lattice");
    const double hs = lad.step;

    const std::vector<ScalarField> psi0 = psi_fields(W0_all, lad);
    const LadderPlanes psit = psi_planes(Wdata_gamma);
    const std::vector<ScalarField> psi = assemble_boundary_data(psi0, psit, g);

    std::vector<std::vector<double>> Vt(lad.count);
    for (int n = 0; n < lad.count; ++n) {
        std::vector<double> plane(Wdata_gamma.plane(n),
                                  Wdata_gamma.plane(n) + std::size_t(g.nx) * g.ny);
        Vt[n] = observed_tail(plane, lad.s(n));
    }

    FemSystem fem(g);
    FemSystem femR(g, enlarged_box(g, 1));

    InversionResult res;
    const double sbar = lad.s(0);
    ScalarField V = initial_tail(fem, psi[0], sbar);
    ScalarField qsum(g, 0.0);
    ScalarField eps_cur(g, 1.0);
    ScalarField gqx(g), gqy(g), gqz(g), gVx(g), gVy(g), gVz(g);
    const std::size_t omega_n = g.omega_count();

    for (int n = 1; n <= N; ++n) {
        const double s_n = lad.s(n);
        ScalarField psi_n = psi[n - 1];
        for (std::size_t p = 0; p < psi_n.v.size(); ++p)
            psi_n.v[p] = 0.5 * (psi_n.v[p] + psi[n].v[p]);
        const CwfCoeffs cf = derive_coeffs(lad, n, cfg.mu);
        res.coeffs.push_back(cf);
        res.D0.push_back(gamma_l2(g, V, Vt[n]));
        res.snaps.push_back(eps_cur);

        ScalarField eps_prev = eps_cur;
        ScalarField q;
        bool have_q = false;
        std::vector<double> Bh, Dh;
        int mn = 0;
        try {
            for (int i = 1; i <= cfg.imax; ++i) {
                grad_field(g, qsum, gqx, gqy, gqz);
                grad_field(g, V, gVx, gVy, gVz);
                ScalarField cx = gqx, cy = gqy, cz = gqz;
                for (std::size_t p = 0; p < cx.v.size(); ++p) {
                    cx.v[p] -= gVx.v[p];
                    cy.v[p] -= gVy.v[p];
                    cz.v[p] -= gVz.v[p];
                }
                ScalarField qi = fem.solve_q_equation(cx, cy, cz, cf.A1, cf.A2, psi_n);
                ScalarField w(g, 0.0);
                for (std::size_t p = 0; p < w.v.size(); ++p) {
                    const double v = -hs * qi.v[p] - qsum.v[p] + V.v[p];
                    w.v[p] = std::exp(s_n * s_n * v);
                }
                const ScalarField epsR = femR.recover_epsilon(w, s_n);
                ScalarField eps_new(g, 1.0);
                for (int kk = g.k0; kk <= g.k1; ++kk)
                    for (int jj = g.j0; jj <= g.j1; ++jj)
                        for (int ii = g.i0; ii <= g.i1; ++ii)
                            eps_new.at(ii, jj, kk) = epsR.at(ii, jj, kk);

                ForwardResult fw = solve_forward(g, eps_new, cfg.pulse, cfg.plan, {s_n});
                ++res.forward_solves;
                ScalarField& Wn = fw.W[0];
                long clipped = 0;
                for (int kk = g.k0; kk <= g.k1; ++kk)
                    for (int jj = g.j0; jj <= g.j1; ++jj)
                        for (int ii = g.i0; ii <= g.i1; ++ii)
                            if (!(Wn.at(ii, jj, kk) > 0.0)) ++clipped;
                res.clipped_nodes += clipped;
                if (double(clipped) > cfg.clip_abort_fraction * double(omega_n)) {
                    std::ostringstream os;
                    os << clipped << " of " << omega_n
                       << " observable-region nodes have a non-positive transform";
                    throw RuntimeError(os.str());
                }
                ScalarField Vnew(g, 0.0);
                for (std::size_t p = 0; p < Vnew.v.size(); ++p)
                    Vnew.v[p] = std::log(std::max(Wn.v[p], 1e-300)) / (s_n * s_n);

                Bh.push_back(rel_change_omega(g, eps_new, eps_prev));
                Dh.push_back(gamma_l2(g, Vnew, Vt[n]));
                const InnerStop dec = inner_stop(Bh, Dh, cfg.eta);
                if (dec == InnerStop::StopRollback) {
                    mn = i - 1;
                    break;
                }
                V = Vnew;
                eps_prev = eps_new;
                q = qi;
                have_q = true;
                mn = i;
                if (dec == InnerStop::StopKeep) break;
            }
        } catch (const RuntimeError& e) {
            std::ostringstream os;
            os << "interval " << n << " (s=" << s_n << "), inner iterate " << (mn + 1) << ": "
               << e.what();
            throw RuntimeError(os.str());
        }
        if (!have_q) throw RuntimeError("inner loop accepted no iterate");  // unreachable
        if (mn == cfg.imax) res.cap_hit = true;
        for (std::size_t p = 0; p < qsum.v.size(); ++p) qsum.v[p] += hs * q.v[p];
        eps_cur = eps_prev;
        res.Dm.push_back(Dh[mn - 1]);
        res.mns.push_back(mn);
        res.Bhist.push_back(std::move(Bh));
        res.Dhist.push_back(std::move(Dh));
    }
    res.eps_final = eps_cur;
    return res;
}

}  // namespace glow
