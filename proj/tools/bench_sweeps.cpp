// Benchmark: OpenMP sweep kernel against the serial reference. The two paths
// must produce byte-identical reports; the benchmark prints both timings and
// the speedup.

#include <omp.h>

#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "entlab/verify.hpp"

int main(int argc, char** argv) {
    entlab::SweepConfig cfg;
    cfg.trials = argc > 1 ? std::atoi(argv[1]) : 1500;
    cfg.depth_max = 7;
    cfg.seed = 2024;
    std::string theorem = argc > 2 ? argv[2] : "embed-haar";

    cfg.serial = true;
    double t0 = omp_get_wtime();
    entlab::VerifyResult serial = entlab::run_verifier(theorem, cfg);
    double t_serial = omp_get_wtime() - t0;

    cfg.serial = false;
    t0 = omp_get_wtime();
    entlab::VerifyResult parallel = entlab::run_verifier(theorem, cfg);
    double t_parallel = omp_get_wtime() - t0;

    // the reports differ only in the serial flag they echo
    nlohmann::json a = serial.report, b = parallel.report;
    a["config"].erase("serial");
    b["config"].erase("serial");
    bool identical = a.dump() == b.dump();

    std::printf("%s trials=%d threads=%d\n", theorem.c_str(), cfg.trials,
                omp_get_max_threads());
    std::printf("serial    %8.3f s\n", t_serial);
    std::printf("openmp    %8.3f s\n", t_parallel);
    std::printf("speedup   %8.2fx\n", t_serial / t_parallel);
    std::printf("reports identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
