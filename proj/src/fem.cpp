#include "glow/fem.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

namespace glow {

FemBox omega_box(const Grid3& g) { return {g.i0, g.i1, g.j0, g.j1, g.k0, g.k1}; }

FemBox enlarged_box(const Grid3& g, int layers) {
    FemBox b{g.i0 - layers, g.i1 + layers, g.j0 - layers, g.j1 + layers, g.k0 - layers,
             g.k1 + layers};
    if (b.i0 < 0 || b.j0 < 0 || b.k0 < 0 || b.i1 > g.nx - 1 || b.j1 > g.ny - 1 ||
        b.k1 > g.nz - 1)
        throw ConfigError("enlarged assembly box leaves the grid");
    return b;
}

namespace {

constexpr double kGP[2] = {0.5 - 0.5 / 1.7320508075688772, 0.5 + 0.5 / 1.7320508075688772};

void check_field(const ScalarField& f, const Grid3& g, const char* what) {
    if (f.nx != g.nx || f.ny != g.ny || f.nz != g.nz) {
        std::ostringstream os;
        os << what << " shape does not match the grid";
        throw ConfigError(os.str());
    }
}

}  // namespace

FemSystem::FemSystem(const Grid3& g, const FemBox& box) : g_(g), box_(box) {
    const double h = g.hx;
    if (std::abs(g.hy - h) > 1e-12 * h || std::abs(g.hz - h) > 1e-12 * h)
        throw ConfigError("finite element assembly requires cubic cells");
    h_ = h;
    if (box_.i0 < 0 || box_.j0 < 0 || box_.k0 < 0 || box_.i1 > g.nx - 1 ||
        box_.j1 > g.ny - 1 || box_.k1 > g.nz - 1)
        throw ConfigError("assembly box leaves the grid");
    nxO_ = box_.i1 - box_.i0 + 1;
    nyO_ = box_.j1 - box_.j0 + 1;
    nzO_ = box_.k1 - box_.k0 + 1;
    if (nxO_ < 3 || nyO_ < 3 || nzO_ < 3)
        throw ConfigError("assembly box needs at least three nodes per axis");
    nn_ = std::size_t(nxO_) * nyO_ * nzO_;

    // shape values/gradients at the 2x2x2 Gauss points; Gauss index g has the
    // x point fastest, local node l = 4*dk + 2*dj + di
    for (int gz = 0; gz < 2; ++gz)
        for (int gy = 0; gy < 2; ++gy)
            for (int gx = 0; gx < 2; ++gx) {
                const int gi = 4 * gz + 2 * gy + gx;
                const double px = kGP[gx], py = kGP[gy], pz = kGP[gz];
                for (int l = 0; l < 8; ++l) {
                    const int di = l & 1, dj = (l >> 1) & 1, dk = (l >> 2) & 1;
                    const double fx = di ? px : 1.0 - px;
                    const double fy = dj ? py : 1.0 - py;
                    const double fz = dk ? pz : 1.0 - pz;
                    const double dfx = (di ? 1.0 : -1.0) / h;
                    const double dfy = (dj ? 1.0 : -1.0) / h;
                    const double dfz = (dk ? 1.0 : -1.0) / h;
                    Nval_[gi][l] = fx * fy * fz;
                    Gval_[gi][l][0] = dfx * fy * fz;
                    Gval_[gi][l][1] = fx * dfy * fz;
                    Gval_[gi][l][2] = fx * fy * dfz;
                }
            }
    wg_ = h * h * h / 8.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            double acc = 0.0;
            for (int gi = 0; gi < 8; ++gi)
                for (int d = 0; d < 3; ++d) acc += Gval_[gi][i][d] * Gval_[gi][j][d];
            Ke_[i][j] = wg_ * acc;
        }
    for (int gy = 0; gy < 2; ++gy)
        for (int gx = 0; gx < 2; ++gx) {
            const int gi = 2 * gy + gx;
            for (int l = 0; l < 4; ++l) {
                const int di = l & 1, dj = (l >> 1) & 1;
                const double fx = di ? kGP[gx] : 1.0 - kGP[gx];
                const double fy = dj ? kGP[gy] : 1.0 - kGP[gy];
                N2_[gi][l] = fx * fy;
            }
        }
    w2_ = h * h / 4.0;

    nodes_.resize(nn_);
    isb_.assign(nn_, 0);
    intid_.assign(nn_, -1);
    bndid_.assign(nn_, -1);
    for (int k = box_.k0; k <= box_.k1; ++k)
        for (int j = box_.j0; j <= box_.j1; ++j)
            for (int i = box_.i0; i <= box_.i1; ++i) {
                const std::size_t n = box_node(i, j, k);
                nodes_[n] = {i, j, k};
                isb_[n] = (i == box_.i0 || i == box_.i1 || j == box_.j0 || j == box_.j1 ||
                           k == box_.k0 || k == box_.k1)
                              ? 1
                              : 0;
            }
    int32_t ic = 0, bc = 0;
    for (std::size_t n = 0; n < nn_; ++n) {
        if (isb_[n])
            bndid_[n] = bc++;
        else
            intid_[n] = ic++;
    }
    ni_ = std::size_t(ic);
    nb_ = std::size_t(bc);

    enod_.reserve(std::size_t(nxO_ - 1) * (nyO_ - 1) * (nzO_ - 1));
    for (int k = box_.k0; k < box_.k1; ++k)
        for (int j = box_.j0; j < box_.j1; ++j)
            for (int i = box_.i0; i < box_.i1; ++i) {
                std::array<int32_t, 8> e;
                for (int l = 0; l < 8; ++l) {
                    const int di = l & 1, dj = (l >> 1) & 1, dk = (l >> 2) & 1;
                    e[l] = int32_t(box_node(i + di, j + dj, k + dk));
                }
                enod_.push_back(e);
            }

    std::vector<Eigen::Triplet<double>> tii, tib;
    tii.reserve(enod_.size() * 32);
    tib.reserve(enod_.size() * 32);
    for (const auto& e : enod_)
        for (int a = 0; a < 8; ++a) {
            if (isb_[e[a]]) continue;
            const int r = intid_[e[a]];
            for (int b = 0; b < 8; ++b) {
                if (isb_[e[b]])
                    tib.emplace_back(r, bndid_[e[b]], Ke_[a][b]);
                else
                    tii.emplace_back(r, intid_[e[b]], Ke_[a][b]);
            }
        }
    Gii_.resize(Eigen::Index(ni_), Eigen::Index(ni_));
    Gii_.setFromTriplets(tii.begin(), tii.end());
    Gib_.resize(Eigen::Index(ni_), Eigen::Index(nb_));
    Gib_.setFromTriplets(tib.begin(), tib.end());
}

std::vector<double> FemSystem::gather(const ScalarField& f) const {
    std::vector<double> out(nn_);
    for (std::size_t n = 0; n < nn_; ++n)
        out[n] = f.at(nodes_[n][0], nodes_[n][1], nodes_[n][2]);
    return out;
}

void FemSystem::scatter(const std::vector<double>& vals, ScalarField& out) const {
    for (std::size_t n = 0; n < nn_; ++n)
        out.at(nodes_[n][0], nodes_[n][1], nodes_[n][2]) = vals[n];
}

ScalarField FemSystem::solve_dirichlet_laplace(const ScalarField& bval) const {
    check_field(bval, g_, "boundary field");
    Eigen::VectorXd xb = Eigen::VectorXd::Zero(Eigen::Index(nb_));
    for (std::size_t n = 0; n < nn_; ++n)
        if (isb_[n]) {
            const double val = bval.at(nodes_[n][0], nodes_[n][1], nodes_[n][2]);
            if (!std::isfinite(val)) throw ConfigError("non-finite Dirichlet boundary value");
            xb[bndid_[n]] = val;
        }
    Eigen::VectorXd rhs = -(Gib_ * xb);
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double, Eigen::RowMajor>,
                             Eigen::Lower | Eigen::Upper>
        cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(Eigen::Index(10 * ni_));
    cg.compute(Gii_);
    Eigen::VectorXd xi = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
        throw RuntimeError("harmonic extension solve did not converge");
    ScalarField out = bval;
    std::vector<double> full(nn_);
    for (std::size_t n = 0; n < nn_; ++n)
        full[n] = isb_[n] ? xb[bndid_[n]] : xi[intid_[n]];
    scatter(full, out);
    return out;
}

ScalarField FemSystem::solve_q_equation(const ScalarField& gx, const ScalarField& gy,
                                        const ScalarField& gz, double A1, double A2,
                                        const ScalarField& psi_n,
                                        const ScalarField* rhs_override) const {
    check_field(gx, g_, "gradient field");
    check_field(gy, g_, "gradient field");
    check_field(gz, g_, "gradient field");
    check_field(psi_n, g_, "Dirichlet field");
    if (rhs_override) check_field(*rhs_override, g_, "right-hand side");
    const std::vector<double> gxn = gather(gx), gyn = gather(gy), gzn = gather(gz);
    const std::vector<double> psn = gather(psi_n);
    std::vector<double> rhn;
    if (rhs_override) rhn = gather(*rhs_override);
    for (std::size_t n = 0; n < nn_; ++n)
        if (!std::isfinite(gxn[n]) || !std::isfinite(gyn[n]) || !std::isfinite(gzn[n]) ||
            !std::isfinite(psn[n]) || (rhs_override && !std::isfinite(rhn[n])))
            throw ConfigError("non-finite input to the convection-diffusion solve");

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(enod_.size() * 40);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(ni_));
    double Ael[8][8], Lel[8];
    for (const auto& e : enod_) {
        double gxg[8], gyg[8], gzg[8], fg[8];
        for (int gi = 0; gi < 8; ++gi) {
            double vx = 0, vy = 0, vz = 0, vf = 0;
            for (int l = 0; l < 8; ++l) {
                const double N = Nval_[gi][l];
                vx += N * gxn[e[l]];
                vy += N * gyn[e[l]];
                vz += N * gzn[e[l]];
                if (rhs_override) vf += N * rhn[e[l]];
            }
            gxg[gi] = vx;
            gyg[gi] = vy;
            gzg[gi] = vz;
            fg[gi] = rhs_override ? vf : -A2 * (vx * vx + vy * vy + vz * vz);
        }
        for (int a = 0; a < 8; ++a) {
            double lacc = 0.0;
            for (int gi = 0; gi < 8; ++gi) lacc += fg[gi] * Nval_[gi][a];
            Lel[a] = wg_ * lacc;
            for (int b = 0; b < 8; ++b) {
                double cacc = 0.0;
                for (int gi = 0; gi < 8; ++gi)
                    cacc += Nval_[gi][a] * (gxg[gi] * Gval_[gi][b][0] + gyg[gi] * Gval_[gi][b][1] +
                                            gzg[gi] * Gval_[gi][b][2]);
                Ael[a][b] = Ke_[a][b] + A1 * wg_ * cacc;
            }
        }
        for (int a = 0; a < 8; ++a) {
            if (isb_[e[a]]) continue;
            const int r = intid_[e[a]];
            rhs[r] -= Lel[a];
            for (int b = 0; b < 8; ++b) {
                if (isb_[e[b]])
                    rhs[r] -= Ael[a][b] * psn[e[b]];
                else
                    trips.emplace_back(r, intid_[e[b]], Ael[a][b]);
            }
        }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> Aii{Eigen::Index(ni_), Eigen::Index(ni_)};
    Aii.setFromTriplets(trips.begin(), trips.end());

    Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>> solver;
    solver.setTolerance(1e-10);
    solver.setMaxIterations(Eigen::Index(10 * ni_));
    solver.compute(Aii);
    Eigen::VectorXd xi = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
        // diagonal preconditioning can stagnate on convection-heavy systems;
        // retry with an incomplete factorization before giving up
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>,
                        Eigen::IncompleteLUT<double>>
            ilut;
        ilut.setTolerance(1e-10);
        ilut.setMaxIterations(Eigen::Index(10 * ni_));
        ilut.compute(Aii);
        xi = ilut.solve(rhs);
        if (ilut.info() != Eigen::Success)
            throw RuntimeError("convection-diffusion solve did not converge");
    }
    ScalarField out = psi_n;
    std::vector<double> full = psn;
    for (std::size_t n = 0; n < nn_; ++n)
        if (!isb_[n]) full[n] = xi[intid_[n]];
    scatter(full, out);
    return out;
}

std::vector<double> FemSystem::flux_load(const ScalarField& v, const ScalarField& w,
                                         double s) const {
    const double s2 = s * s;
    std::vector<double> F(nn_, 0.0);
    // one face per call: 'a' and 'b' run over the in-face axes, 'fix' is the
    // face node index along the normal, sgn the outward direction
    auto face = [&](int axis, int fix, int sgn) {
        int a0, a1, b0, b1;
        if (axis == 0) {
            a0 = box_.j0; a1 = box_.j1; b0 = box_.k0; b1 = box_.k1;
        } else if (axis == 1) {
            a0 = box_.i0; a1 = box_.i1; b0 = box_.k0; b1 = box_.k1;
        } else {
            a0 = box_.i0; a1 = box_.i1; b0 = box_.j0; b1 = box_.j1;
        }
        const int na = a1 - a0 + 1, nb = b1 - b0 + 1;
        auto fval = [&](int a, int b) {
            int i, j, k;
            if (axis == 0) { i = fix; j = a; k = b; }
            else if (axis == 1) { i = a; j = fix; k = b; }
            else { i = a; j = b; k = fix; }
            const int d1[3] = {axis == 0 ? sgn : 0, axis == 1 ? sgn : 0, axis == 2 ? sgn : 0};
            const double v0 = v.at(i, j, k);
            const double v1 = v.at(i + d1[0], j + d1[1], k + d1[2]);
            const double v2 = v.at(i + 2 * d1[0], j + 2 * d1[1], k + 2 * d1[2]);
            const double dn = (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * h_);
            return s2 * w.at(i, j, k) * dn;
        };
        auto nid2 = [&](int a, int b) {
            if (axis == 0) return box_node(fix, a, b);
            if (axis == 1) return box_node(a, fix, b);
            return box_node(a, b, fix);
        };
        std::vector<double> fn(std::size_t(na) * nb);
        for (int b = 0; b < nb; ++b)
            for (int a = 0; a < na; ++a) fn[std::size_t(b) * na + a] = fval(a0 + a, b0 + b);
        for (int b = 0; b < nb - 1; ++b)
            for (int a = 0; a < na - 1; ++a) {
                const double c[4] = {fn[std::size_t(b) * na + a], fn[std::size_t(b) * na + a + 1],
                                     fn[std::size_t(b + 1) * na + a],
                                     fn[std::size_t(b + 1) * na + a + 1]};
                const std::size_t nd[4] = {nid2(a0 + a, b0 + b), nid2(a0 + a + 1, b0 + b),
                                           nid2(a0 + a, b0 + b + 1), nid2(a0 + a + 1, b0 + b + 1)};
                double fgp[4];
                for (int gi = 0; gi < 4; ++gi) {
                    double acc = 0.0;
                    for (int l = 0; l < 4; ++l) acc += c[l] * N2_[gi][l];
                    fgp[gi] = acc;
                }
                for (int l = 0; l < 4; ++l) {
                    double acc = 0.0;
                    for (int gi = 0; gi < 4; ++gi) acc += fgp[gi] * N2_[gi][l];
                    F[nd[l]] += w2_ * acc;
                }
            }
    };
    face(0, box_.i0, -1);
    face(0, box_.i1, +1);
    face(1, box_.j0, -1);
    face(1, box_.j1, +1);
    face(2, box_.k0, -1);
    face(2, box_.k1, +1);
    return F;
}

ScalarField FemSystem::recover_epsilon(const ScalarField& w, double s) const {
    check_field(w, g_, "transform field");
    if (!(s > 0.0)) throw ConfigError("pseudo-frequency must be positive");
    if (box_.i0 < 2 || box_.j0 < 2 || box_.k0 < 2 || box_.i1 > g_.nx - 3 ||
        box_.j1 > g_.ny - 3 || box_.k1 > g_.nz - 3)
        throw ConfigError("recovery needs two node layers outside every box face");
    for (std::size_t p = 0; p < w.v.size(); ++p)
        if (!(w.v[p] > 0.0) || !std::isfinite(w.v[p])) {
            std::ostringstream os;
            os << "non-positive transform value " << w.v[p] << " at node " << p
               << "; cannot take logarithms";
            throw RuntimeError(os.str());
        }
    const double s2 = s * s;
    ScalarField v(w.nx, w.ny, w.nz, 0.0);
    for (std::size_t p = 0; p < w.v.size(); ++p) v.v[p] = std::log(w.v[p]) / s2;

    const std::vector<double> wn = gather(w);
    std::vector<double> ML(nn_, 0.0), Gw(nn_, 0.0);
    for (const auto& e : enod_) {
        double weg[8];
        for (int gi = 0; gi < 8; ++gi) {
            double acc = 0.0;
            for (int l = 0; l < 8; ++l) acc += Nval_[gi][l] * wn[e[l]];
            weg[gi] = acc;
        }
        for (int a = 0; a < 8; ++a) {
            double macc = 0.0;
            for (int gi = 0; gi < 8; ++gi) macc += weg[gi] * Nval_[gi][a];
            ML[e[a]] += wg_ * macc;
            double gacc = 0.0;
            for (int b = 0; b < 8; ++b) gacc += Ke_[a][b] * wn[e[b]];
            Gw[e[a]] += gacc;
        }
    }
    const std::vector<double> F = flux_load(v, w, s);
    std::vector<double> eps(nn_);
    for (std::size_t n = 0; n < nn_; ++n) {
        const double val = (-Gw[n] + F[n]) / (s2 * ML[n]);
        eps[n] = std::min(15.0, std::max(1.0, val));
    }
    ScalarField out(w.nx, w.ny, w.nz, 1.0);
    scatter(eps, out);
    return out;
}

}  // namespace glow
