#include "qflo/random.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#include "qflo/parallel.hpp"

namespace qflo {

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = mix64(master);
    for (const auto c : path) {
        s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return s;
}

std::uint64_t entropy_seed()
{
    std::random_device rd;
    std::uint64_t s = 0;
    while (s == 0) {
        s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    return s;
}

unsigned thread_count()
{
    if (const char *env = std::getenv("QFLO_THREADS"); env != nullptr && *env != '\0') {
        try {
            const long v = std::stol(env);
            if (v > 0) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception &) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

double pairwise_sum(std::span<const double> xs)
{
    if (xs.size() <= 8) {
        double s = 0.0;
        for (const double x : xs) {
            s += x;
        }
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace qflo
