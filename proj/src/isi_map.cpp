#include "psbm/isi_map.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <thread>

namespace psbm {

void IsiScanConfig::validate() const {
    auto increasing = [](const std::vector<double>& v) {
        return std::is_sorted(v.begin(), v.end()) &&
               std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (alpha_grid.empty() || !increasing(alpha_grid))
        throw std::invalid_argument("IsiScanConfig: alpha_grid must be strictly increasing");
    if (tau_grid.empty() || !increasing(tau_grid))
        throw std::invalid_argument("IsiScanConfig: tau_grid must be strictly increasing");
    if (alpha_grid.front() < 0.0 || alpha_grid.back() > 2.0)
        throw std::invalid_argument("IsiScanConfig: alpha_grid must lie in [0, 2]");
    if (tau_grid.front() < 0.0 || tau_grid.back() >= 1.0)
        throw std::invalid_argument("IsiScanConfig: tau_grid must lie in [0, 1)");
    if (mu_thresholds.empty())
        throw std::invalid_argument("IsiScanConfig: at least one threshold required");
    for (double mu : mu_thresholds)
        if (mu <= 0.0)
            throw std::invalid_argument("IsiScanConfig: thresholds must be positive");
    if (trunc_halfwidth <= 0.0 || max_lag < 1)
        throw std::invalid_argument("IsiScanConfig: bad truncation or lag window");
}

IsiScanConfig IsiScanConfig::defaults() {
    IsiScanConfig c;
    for (int i = 0; i <= 200; ++i)
        c.alpha_grid.push_back(i * 0.01);
    // default scan keeps tau in [0.05, 0.95]; boundary values remain selectable
    for (int i = 5; i <= 95; ++i)
        c.tau_grid.push_back(i * 0.01);
    c.mu_thresholds = {0.1, 0.05, 0.02, 0.01};
    return c;
}

IsiTapProfile isi_taps(double alpha, double tau, double d, int max_lag) {
    if (tau < 0.0 || tau >= 1.0)
        throw std::invalid_argument("isi_taps: tau must be in [0, 1)");
    IsiTapProfile p;
    p.symbol_spacing = 1.0 - tau;
    p.taps_nonneg.resize(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k)
        p.taps_nonneg[static_cast<std::size_t>(k)] =
            pulse_inner_product(alpha, k * (1.0 - tau), d);
    return p;
}

int isi_count(const IsiTapProfile& profile, double mu) {
    if (mu <= 0.0)
        throw std::invalid_argument("isi_count: mu must be > 0");
    int c = 0;
    for (int k = 1; k <= profile.max_lag(); ++k)
        if (std::abs(profile.tap(k)) > mu)
            ++c;
    return 2 * c;
}

IsiCountGrid scan_plane(const IsiScanConfig& config) {
    config.validate();
    IsiCountGrid grid;
    grid.alphas = config.alpha_grid;
    grid.taus = config.tau_grid;
    grid.mus = config.mu_thresholds;
    grid.counts.assign(grid.alphas.size() * grid.taus.size() * grid.mus.size(), 0);

    const std::size_t na = grid.alphas.size();
    const std::size_t nt = grid.taus.size();
    const std::size_t nm = grid.mus.size();

    // All offsets k (1 - tau) must land on the table grid; 1/400 Tp divides
    // the 0.01 grids used here and keeps the Simpson error below 1e-8.
    const int table_steps = 400;
    double max_off = 0.0;
    for (double tau : grid.taus)
        max_off = std::max(max_off, config.max_lag * (1.0 - tau));

    auto scan_rows = [&](std::size_t a_begin, std::size_t a_end) {
        for (std::size_t ai = a_begin; ai < a_end; ++ai) {
            const detail::PulseTable table(grid.alphas[ai], config.trunc_halfwidth, max_off,
                                           table_steps);
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const double spacing = 1.0 - grid.taus[ti];
                int above[64] = {}; // per-threshold counts of positive lags
                for (int k = 1; k <= config.max_lag; ++k) {
                    const double tap = std::abs(table.inner_product(k * spacing));
                    for (std::size_t mi = 0; mi < nm; ++mi)
                        if (tap > grid.mus[mi])
                            ++above[mi];
                }
                for (std::size_t mi = 0; mi < nm; ++mi)
                    grid.counts[(ai * nt + ti) * nm + mi] = 2 * above[mi];
            }
        }
    };

    const int nthreads = std::max(1, config.threads);
    if (nthreads == 1 || na < 2) {
        scan_rows(0, na);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (na + nthreads - 1) / static_cast<std::size_t>(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            const std::size_t lo = static_cast<std::size_t>(t) * chunk;
            if (lo >= na)
                break;
            pool.emplace_back(scan_rows, lo, std::min(na, lo + chunk));
        }
        for (auto& th : pool)
            th.join();
    }
    return grid;
}

std::vector<Region> find_two_tap_regions(const IsiCountGrid& grid, double mu) {
    std::size_t mi = grid.mus.size();
    for (std::size_t i = 0; i < grid.mus.size(); ++i)
        if (std::abs(grid.mus[i] - mu) < 1e-12)
            mi = i;
    if (mi == grid.mus.size())
        throw std::invalid_argument("find_two_tap_regions: mu not present in grid");

    const std::size_t na = grid.alphas.size();
    const std::size_t nt = grid.taus.size();
    std::vector<char> seen(na * nt, 0);
    std::vector<Region> regions;

    for (std::size_t ai = 0; ai < na; ++ai) {
        for (std::size_t ti = 0; ti < nt; ++ti) {
            if (seen[ai * nt + ti] || grid.count(ai, ti, mi) != 2)
                continue;
            Region r{grid.alphas[ai], grid.alphas[ai], grid.taus[ti], grid.taus[ti], 0};
            std::queue<std::pair<std::size_t, std::size_t>> q;
            q.push({ai, ti});
            seen[ai * nt + ti] = 1;
            while (!q.empty()) {
                auto [a, t] = q.front();
                q.pop();
                ++r.cells;
                r.alpha_min = std::min(r.alpha_min, grid.alphas[a]);
                r.alpha_max = std::max(r.alpha_max, grid.alphas[a]);
                r.tau_min = std::min(r.tau_min, grid.taus[t]);
                r.tau_max = std::max(r.tau_max, grid.taus[t]);
                const std::size_t base = a * nt + t;
                auto visit = [&](std::size_t a2, std::size_t t2) {
                    if (!seen[a2 * nt + t2] && grid.count(a2, t2, mi) == 2) {
                        seen[a2 * nt + t2] = 1;
                        q.push({a2, t2});
                    }
                };
                (void)base;
                if (a > 0) visit(a - 1, t);
                if (a + 1 < na) visit(a + 1, t);
                if (t > 0) visit(a, t - 1);
                if (t + 1 < nt) visit(a, t + 1);
            }
            regions.push_back(r);
        }
    }
    return regions;
}

} // namespace psbm
