#pragma once

#include "psbm/pulse.hpp"

#include <vector>

namespace psbm {

struct IsiScanConfig {
    std::vector<double> alpha_grid;    // strictly increasing, within [0, 2]
    std::vector<double> tau_grid;      // strictly increasing, within [0, 1)
    std::vector<double> mu_thresholds; // strictly positive
    double trunc_halfwidth = 4.0;
    int max_lag = 8;
    int threads = 1;

    void validate() const;

    static IsiScanConfig defaults();
};

// count per (alpha, tau, mu), always even; indexed [ai][ti][mi]
struct IsiCountGrid {
    std::vector<double> alphas;
    std::vector<double> taus;
    std::vector<double> mus;
    std::vector<int> counts; // row-major (alpha, tau, mu)

    int count(std::size_t ai, std::size_t ti, std::size_t mi) const {
        return counts[(ai * taus.size() + ti) * mus.size() + mi];
    }
};

struct Region {
    double alpha_min, alpha_max;
    double tau_min, tau_max;
    std::size_t cells;
    bool contains(double a, double t) const {
        return a >= alpha_min && a <= alpha_max && t >= tau_min && t <= tau_max;
    }
};

// taps at lags |k| <= max_lag for symbol spacing (1 - tau) pulse periods
IsiTapProfile isi_taps(double alpha, double tau, double d, int max_lag);

// |{k != 0 : |tap(k)| > mu}|; even by tap symmetry
int isi_count(const IsiTapProfile& profile, double mu);

// Scan the (alpha, tau) plane for every threshold. Cells are independent and
// the scan may be split across threads; results are written into a
// preallocated grid so the output never depends on scheduling.
IsiCountGrid scan_plane(const IsiScanConfig& config);

// connected components (4-neighborhood) of count-2 cells at threshold mu,
// reported as bounding boxes
std::vector<Region> find_two_tap_regions(const IsiCountGrid& grid, double mu);

} // namespace psbm
