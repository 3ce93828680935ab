// Serial reference vs OpenMP kernels. Prints median wall time of each kernel
// and the largest relative disagreement between the two.
//
//   bench_kernels [n=200000] [p=8] [reps=7]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "phasefield/graphs.hpp"
#include "phasefield/iso.hpp"
#include "phasefield/kernels.hpp"

using namespace phasefield;

namespace {

double median_seconds(int reps, const std::function<void()>& f)
{
    std::vector<double> t;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
    return t[t.size() / 2];
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b)
{
    double worst = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q)
        worst = std::max(worst, std::abs(a[q] - b[q]) / std::max(1.0, std::abs(a[q])));
    return worst;
}

void row(const char* name, double serial, double parallel, double diff)
{
    std::printf("%-16s %12.3f %12.3f %9.2fx %12.1e\n", name, serial * 1e3, parallel * 1e3, serial / parallel, diff);
}

volatile double sink = 0.0;

} // namespace

int main(int argc, char** argv)
{
    const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
    const int p = argc > 2 ? std::atoi(argv[2]) : 8;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 7;

    Rng rng(1);
    PhaseDataset d(n, p);
    for (std::size_t k = 0; k < n; ++k)
        for (int u = 0; u < p; ++u) d.set(k, u, rng.uniform_angle());
    const IsoDesign design(NodeProblem::full(0, p), d);
    std::vector<double> theta(design.dim());
    for (auto& v : theta) v = rng.uniform(-0.5, 0.5);
    const auto model = uniform_coupling(random_tree(p, rng), 1.0);

    std::printf("n = %zu, p = %d, threads = %d, median of %d runs\n", n, p, omp_get_max_threads(), reps);
    std::printf("%-16s %12s %12s %10s %12s\n", "kernel", "serial ms", "omp ms", "speedup", "max rel diff");

    {
        const auto a = kernels::serial::iso_eval(design.view(), theta);
        const auto b = kernels::omp::iso_eval(design.view(), theta);
        auto va = a.gradient, vb = b.gradient;
        va.push_back(a.objective);
        vb.push_back(b.objective);
        row("iso_eval", median_seconds(reps, [&] { sink = kernels::serial::iso_eval(design.view(), theta).objective; }),
            median_seconds(reps, [&] { sink = kernels::omp::iso_eval(design.view(), theta).objective; }), max_rel(va, vb));
    }
    {
        const auto a = kernels::serial::correlation(design.view());
        const auto b = kernels::omp::correlation(design.view());
        row("correlation", median_seconds(reps, [&] { sink = kernels::serial::correlation(design.view())[0]; }),
            median_seconds(reps, [&] { sink = kernels::omp::correlation(design.view())[0]; }), max_rel(a, b));
    }
    {
        const auto a = kernels::serial::pair_sums(d);
        const auto b = kernels::omp::pair_sums(d);
        row("pair_sums", median_seconds(reps, [&] { sink = kernels::serial::pair_sums(d).cos_sum[1]; }),
            median_seconds(reps, [&] { sink = kernels::omp::pair_sums(d).cos_sum[1]; }), max_rel(a.cos_sum, b.cos_sum));
    }
    {
        const auto a = kernels::serial::mc_energies(model, n, 3);
        const auto b = kernels::omp::mc_energies(model, n, 3);
        row("mc_energies", median_seconds(reps, [&] { sink = kernels::serial::mc_energies(model, n, 3)[0]; }),
            median_seconds(reps, [&] { sink = kernels::omp::mc_energies(model, n, 3)[0]; }), max_rel(a, b));
    }
    return 0;
}
