#include "glow/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace glow {

namespace {

void check_lattice(const TraceSet& a, const TraceSet& b) {
    if (a.nx != b.nx || a.ny != b.ny || a.nsteps != b.nsteps ||
        std::abs(a.tau - b.tau) > 1e-15)
        throw ConfigError("trace lattices do not match");
}

double max_abs(const TraceSet& tr) {
    double m = 0.0;
    for (double x : tr.v) m = std::max(m, std::abs(x));
    return m;
}

// standard normals from the raw 64-bit stream (Box-Muller), so the realization
// is identical across standard library implementations
class NormalStream {
  public:
    explicit NormalStream(uint64_t seed) : eng_(seed) {}
    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

  private:
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0.0;
};

}  // namespace

TraceSet corrupt(const TraceSet& trace, const CorruptionModel& model, const SourcePulse& pulse,
                 double t_arrival, uint64_t seed) {
    if (model.t0 < 0 || model.sigma < 0 || model.gain <= 0 || model.direct.delay < 0)
        throw ConfigError("corruption model needs t0, sigma, delays >= 0 and gain > 0");
    for (const PulseCopy& e : model.echoes)
        if (e.delay < 0) throw ConfigError("echo delays must be non-negative");
    const std::size_t np = std::size_t(trace.nx) * trace.ny;
    TraceSet out = trace;
    for (int m = 0; m < trace.nsamp(); ++m) {
        double add = 0.0;
        const double t = trace.t(m);
        if (model.direct.amp != 0.0)
            add += model.direct.amp * pulse.f(t - t_arrival - model.direct.delay);
        for (const PulseCopy& e : model.echoes)
            add += e.amp * pulse.f(t - t_arrival - e.delay);
        if (add != 0.0) {
            double* row = out.v.data() + std::size_t(m) * np;
            for (std::size_t p = 0; p < np; ++p) row[p] += add;
        }
    }
    if (model.gain != 1.0)
        for (double& x : out.v) x *= model.gain;
    const int sh = int(std::lround(model.t0 / trace.tau));
    if (sh != 0) {
        std::vector<double> shifted(out.v.size(), 0.0);
        const int keep = out.nsamp() - sh;
        if (keep > 0)
            std::copy(out.v.begin(), out.v.begin() + std::size_t(keep) * np,
                      shifted.begin() + std::size_t(sh) * np);
        out.v.swap(shifted);
    }
    if (model.sigma > 0.0) {
        const double amp = model.sigma * max_abs(trace);
        NormalStream rng(seed);
        for (double& x : out.v) x += amp * rng.next();
    }
    return out;
}

std::vector<double> fractional_shift(const std::vector<double>& a, double lag) {
    const int n = int(a.size());
    std::vector<double> out(a.size(), 0.0);
    for (int m = 0; m < n; ++m) {
        const double x = m + lag;
        if (x < 0.0 || x > double(n - 1)) continue;
        const int i0 = int(std::floor(x));
        const double f = x - i0;
        out[m] = (i0 >= n - 1) ? a[n - 1] : a[i0] * (1.0 - f) + a[i0 + 1] * f;
    }
    return out;
}

namespace {

std::vector<double> position_series(const TraceSet& tr, int i, int j) {
    std::vector<double> out(tr.nsamp());
    for (int m = 0; m < tr.nsamp(); ++m) out[m] = tr.at(m, i, j);
    return out;
}

double detect_lag(const std::vector<double>& rec, const std::vector<double>& tmpl, double tau,
                  double window_end, int max_lag, double min_corr) {
    const int n = int(rec.size());
    int nw = 0;
    while (nw < n && nw * tau <= window_end) ++nw;
    if (nw < 3) throw ConfigError("correlation window too short");
    std::vector<double> vals(2 * max_lag + 1, -1.0);
    for (int L = -max_lag; L <= max_lag; ++L) {
        double rr = 0, tt = 0, rt = 0;
        for (int m = 0; m < nw; ++m) {
            const int idx = m + L;
            if (idx < 0 || idx >= n) continue;
            rr += rec[idx] * rec[idx];
            tt += tmpl[m] * tmpl[m];
            rt += rec[idx] * tmpl[m];
        }
        const double den = std::sqrt(rr) * std::sqrt(tt);
        vals[L + max_lag] = den > 0.0 ? rt / den : -1.0;
    }
    int k = 0;
    for (int m = 1; m < int(vals.size()); ++m)
        if (vals[m] > vals[k]) k = m;
    if (vals[k] < min_corr)
        throw RuntimeError("no direct signal found: correlation peak below threshold");
    double d = 0.0;
    if (k > 0 && k + 1 < int(vals.size())) {
        const double vm = vals[k - 1], v0 = vals[k], vp = vals[k + 1];
        const double den = vm - 2.0 * v0 + vp;
        if (den != 0.0) d = 0.5 * (vm - vp) / den;
    }
    return (k - max_lag) + d;
}

}  // namespace

TraceSet time_zero_correct(const TraceSet& trace, const TraceSet& reference, double window_end,
                           int max_lag, double min_corr, double* detected_lag) {
    check_lattice(trace, reference);
    const int ic = trace.nx / 2, jc = trace.ny / 2;
    const double lag = detect_lag(position_series(trace, ic, jc),
                                  position_series(reference, ic, jc), trace.tau, window_end,
                                  max_lag, min_corr);
    if (detected_lag) *detected_lag = lag;
    TraceSet out = trace;
    for (int j = 0; j < trace.ny; ++j)
        for (int i = 0; i < trace.nx; ++i) {
            const std::vector<double> s = fractional_shift(position_series(trace, i, j), lag);
            for (int m = 0; m < trace.nsamp(); ++m) out.at(m, i, j) = s[m];
        }
    return out;
}

namespace {

int reflect_index(int q, int n) {
    while (q < 0 || q >= n) {
        if (q < 0) q = -q - 1;
        if (q >= n) q = 2 * n - 1 - q;
    }
    return q;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int r = int(4.0 * sigma + 0.5);
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int o = -r; o <= r; ++o) {
        k[o + r] = std::exp(-0.5 * (o / sigma) * (o / sigma));
        sum += k[o + r];
    }
    for (double& x : k) x /= sum;
    return k;
}

}  // namespace

void gaussian_smooth_time(TraceSet& tr, double sigma) {
    if (!(sigma > 0.0)) return;
    const std::vector<double> ker = gaussian_kernel(sigma);
    const int r = (int(ker.size()) - 1) / 2;
    const int n = tr.nsamp();
    std::vector<double> tmp(n);
    for (int j = 0; j < tr.ny; ++j)
        for (int i = 0; i < tr.nx; ++i) {
            for (int m = 0; m < n; ++m) {
                double acc = 0.0;
                for (int o = -r; o <= r; ++o)
                    acc += ker[o + r] * tr.at(reflect_index(m + o, n), i, j);
                tmp[m] = acc;
            }
            for (int m = 0; m < n; ++m) tr.at(m, i, j) = tmp[m];
        }
}

void gaussian_smooth_plane(TraceSet& tr, double sigma) {
    if (!(sigma > 0.0)) return;
    const std::vector<double> ker = gaussian_kernel(sigma);
    const int r = (int(ker.size()) - 1) / 2;
    std::vector<double> tmp(std::size_t(std::max(tr.nx, tr.ny)));
    for (int m = 0; m < tr.nsamp(); ++m) {
        for (int j = 0; j < tr.ny; ++j) {  // along x
            for (int i = 0; i < tr.nx; ++i) {
                double acc = 0.0;
                for (int o = -r; o <= r; ++o)
                    acc += ker[o + r] * tr.at(m, reflect_index(i + o, tr.nx), j);
                tmp[i] = acc;
            }
            for (int i = 0; i < tr.nx; ++i) tr.at(m, i, j) = tmp[i];
        }
        for (int i = 0; i < tr.nx; ++i) {  // along y
            for (int j = 0; j < tr.ny; ++j) {
                double acc = 0.0;
                for (int o = -r; o <= r; ++o)
                    acc += ker[o + r] * tr.at(m, i, reflect_index(j + o, tr.ny));
                tmp[j] = acc;
            }
            for (int j = 0; j < tr.ny; ++j) tr.at(m, i, j) = tmp[j];
        }
    }
}

TraceSet extract_scattered(const TraceSet& total, const TraceSet& background, double gate_start,
                           double gate_end, double match_window, double temporal_sigma,
                           double spatial_sigma) {
    check_lattice(total, background);
    if (!(gate_end > gate_start)) throw ConfigError("empty time gate");
    const std::size_t np = std::size_t(total.nx) * total.ny;
    int nw = 0;
    while (nw < total.nsamp() && nw * total.tau <= match_window) ++nw;
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < std::size_t(nw) * np; ++p) {
        num += total.v[p] * background.v[p];
        den += background.v[p] * background.v[p];
    }
    if (!(den > 0.0)) throw ConfigError("background record is zero in the matching window");
    const double alpha = num / den;
    TraceSet out = total;
    for (std::size_t p = 0; p < out.v.size(); ++p) out.v[p] -= alpha * background.v[p];
    gaussian_smooth_time(out, temporal_sigma);
    gaussian_smooth_plane(out, spatial_sigma);
    for (int m = 0; m < out.nsamp(); ++m) {
        const double t = out.t(m);
        if (t >= gate_start && t <= gate_end) continue;
        double* row = out.v.data() + std::size_t(m) * np;
        std::fill(row, row + np, 0.0);
    }
    return out;
}

TraceSet propagate_data(const TraceSet& scattered, double d) {
    if (d < 0.0) throw ConfigError("propagation distance must be non-negative");
    const double lag = d / scattered.tau;
    if (lag >= double(scattered.nsamp()))
        throw ConfigError("propagation shift exceeds the record length");
    TraceSet out = scattered;
    out.coord = scattered.coord - d;
    if (d == 0.0) return out;
    for (int j = 0; j < out.ny; ++j)
        for (int i = 0; i < out.nx; ++i) {
            const std::vector<double> s =
                fractional_shift(position_series(scattered, i, j), lag);
            for (int m = 0; m < out.nsamp(); ++m) out.at(m, i, j) = s[m];
        }
    return out;
}

TraceSet calibrate(const TraceSet& scattered, const TraceSet& calib_measured,
                   const TraceSet& calib_simulated) {
    const double pm = max_abs(calib_measured);
    const double ps = max_abs(calib_simulated);
    if (!(pm > 0.0) || !(ps > 0.0))
        throw ConfigError("calibration records must have a nonzero peak");
    const double factor = ps / pm;
    TraceSet out = scattered;
    for (double& x : out.v) x *= factor;
    return out;
}

}  // namespace glow
