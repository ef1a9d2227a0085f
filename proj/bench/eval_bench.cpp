// Wall-clock comparison of the OpenMP evaluation loop against the serial
// reference on the fixture knowledge bases.

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <iomanip>
#include <iostream>

#include "dxasp/evaluation.hpp"
#include "dxasp/parser.hpp"

using namespace dxasp;

namespace {

template <class F>
double best_ms(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int reps = 5;
    int copies = 20;
    int threads = 0;
    std::string data = DXASP_FIXTURE_DIR "/dataset.csv";
    CLI::App app{"evaluate vs evaluate_serial"};
    app.add_option("--reps", reps, "Timed repetitions, best is reported")->check(CLI::PositiveNumber);
    app.add_option("--copies", copies, "Dataset replication factor")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "OpenMP threads (0: default)");
    app.add_option("--data", data, "Dataset CSV");
    CLI11_PARSE(app, argc, argv);

    const auto all = load_dataset(data);
    EvalOptions opts;
    opts.threads = threads;
    const int used = threads > 0 ? threads : omp_get_max_threads();

    std::cout << "threads " << used << ", copies " << copies << ", reps " << reps << "\n";
    std::cout << std::left << std::setw(14) << "disease" << std::right << std::setw(9) << "records" << std::setw(13)
              << "serial_ms" << std::setw(13) << "parallel_ms" << std::setw(9) << "speedup" << "\n";

    int mismatches = 0;
    for (const char* disease : {"chickenpox", "pneumonia", "common_cold"}) {
        const Program kb = load_program(std::string(DXASP_FIXTURE_DIR "/") + disease + ".lp");
        std::vector<PatientRecord> records;
        const auto base = records_for(all, disease);
        for (int c = 0; c < copies; ++c) records.insert(records.end(), base.begin(), base.end());

        EvalReport serial, parallel;
        const double ts = best_ms(reps, [&] { serial = evaluate_serial(disease, kb, records, opts); });
        const double tp = best_ms(reps, [&] { parallel = evaluate(disease, kb, records, opts); });
        if (!(serial.rows == parallel.rows) || !(serial.records == parallel.records)) ++mismatches;

        std::cout << std::left << std::setw(14) << disease << std::right << std::setw(9) << records.size()
                  << std::fixed << std::setprecision(2) << std::setw(13) << ts << std::setw(13) << tp
                  << std::setw(9) << ts / tp << "\n";
    }
    if (mismatches) std::cerr << mismatches << " disease(s) differ between serial and parallel results\n";
    return mismatches ? 1 : 0;
}
