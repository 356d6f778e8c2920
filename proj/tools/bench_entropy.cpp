// Compares the serial reference entropy kernel against the OpenMP one on a
// synthetic workload and checks that their outputs match exactly.

#include <chrono>
#include <cstdio>

#include "stgam/entropy.hpp"
#include "stgam/synth.hpp"

using namespace stgam;

namespace {

double run_ms(const auto& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int users = argc > 1 ? std::atoi(argv[1]) : 400;
    int days = argc > 2 ? std::atoi(argv[2]) : 120;

    GridSpec grid = make_synth_grid(2, 2);
    Dataset ds = generate_dataset(synth_a_spec(users / 2, days), grid, 7);
    EntropyConfig cfg;

    std::map<std::string, EntropySequence> serial, parallel;
    // Warm-up pass so page faults do not bias the first timing.
    entropy_sequences_serial(ds, grid, cfg);

    const double serial_ms = run_ms([&] { serial = entropy_sequences_serial(ds, grid, cfg); });
    const double parallel_ms = run_ms([&] { parallel = entropy_sequences(ds, grid, cfg); });

    bool identical = serial.size() == parallel.size();
    if (identical) {
        for (const auto& [uid, seq] : serial) {
            auto it = parallel.find(uid);
            if (it == parallel.end() || it->second.values != seq.values) {
                identical = false;
                break;
            }
        }
    }

    std::printf("users=%d days=%d\n", users, days);
    std::printf("serial:   %.1f ms\n", serial_ms);
    std::printf("parallel: %.1f ms\n", parallel_ms);
    std::printf("speedup:  %.2fx\n", serial_ms / parallel_ms);
    std::printf("outputs identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
