#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace dtc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter or model definition is out of contract.
struct InvalidConfigError : Error {
    using Error::Error;
};

/// The fermionic engine was asked to evolve an interacting model.
struct UnsupportedModelError : Error {
    using Error::Error;
};

/// Requested size exceeds what an engine supports (dense cap, tomography n>3).
struct UnsupportedSizeError : Error {
    using Error::Error;
};

/// Readout channel with eta_bar >= 1/2 cannot be inverted.
struct NonInvertibleChannelError : Error {
    using Error::Error;
};

/// Fewer than two retained qubits: variance across the chain is undefined.
struct UndefinedVarianceError : Error {
    using Error::Error;
};

/// Matrix logarithm hit the branch cut (eigenvalue on the negative real axis).
struct BranchFailureError : Error {
    using Error::Error;
};

/// Experiment spec fails schema validation; carries the offending field path.
struct SchemaError : Error {
    std::string field;
    SchemaError(std::string field_path, const std::string& what)
        : Error("field '" + field_path + "': " + what), field(std::move(field_path)) {}
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Shortest round-trip decimal form of a double; used by every CSV/JSON writer
/// so that re-runs are byte-identical.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    // prefer the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char cand[40];
        std::snprintf(cand, sizeof(cand), "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(cand, "%lf", &back);
        if (back == x) return cand;
    }
    return buf;
}

inline unsigned worker_count() {
    if (const char* env = std::getenv("DTC_WORKERS")) {
        long v = std::atol(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n) on a small worker pool. Tasks must write only to
/// their own slot; aggregation stays deterministic regardless of pool size.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    pool.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
}

}  // namespace dtc
