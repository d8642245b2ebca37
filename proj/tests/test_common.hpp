#pragma once

// Minimal check harness: each TEST registers itself, main runs them all and
// prints one PASS/FAIL line per test. Nonzero exit when anything failed.

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace testing {

struct Registry {
    struct Entry {
        const char* name;
        std::function<void()> fn;
    };
    static std::vector<Entry>& all() {
        static std::vector<Entry> v;
        return v;
    }
    static int& failures() {
        static int f = 0;
        return f;
    }
    static const char*& current() {
        static const char* c = "";
        return c;
    }
};

struct Registrar {
    Registrar(const char* name, std::function<void()> fn) {
        Registry::all().push_back({name, std::move(fn)});
    }
};

inline void fail(const char* file, int line, const std::string& what) {
    std::printf("    FAIL %s:%d  %s\n", file, line, what.c_str());
    ++Registry::failures();
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool close(std::complex<double> a, std::complex<double> b, double tol) {
    return std::abs(a - b) <= tol;
}

} // namespace testing

#define TEST(name)                                                                       \
    static void test_##name();                                                           \
    static testing::Registrar reg_##name(#name, test_##name);                            \
    static void test_##name()

#define CHECK(cond)                                                                      \
    do {                                                                                 \
        if (!(cond))                                                                     \
            testing::fail(__FILE__, __LINE__, #cond);                                    \
    } while (0)

#define CHECK_CLOSE(a, b, tol)                                                           \
    do {                                                                                 \
        auto va_ = (a);                                                                  \
        auto vb_ = (b);                                                                  \
        if (!testing::close(va_, vb_, (tol)))                                            \
            testing::fail(__FILE__, __LINE__,                                            \
                          std::string(#a " vs " #b " differ by more than " #tol));       \
    } while (0)

#define CHECK_THROWS(expr)                                                               \
    do {                                                                                 \
        bool threw_ = false;                                                             \
        try {                                                                            \
            (void)(expr);                                                                \
        } catch (const std::exception&) {                                                \
            threw_ = true;                                                               \
        }                                                                                \
        if (!threw_)                                                                     \
            testing::fail(__FILE__, __LINE__, #expr " did not throw");                   \
    } while (0)

inline int run_all_tests() {
    int failed_tests = 0;
    for (const auto& t : testing::Registry::all()) {
        const int before = testing::Registry::failures();
        testing::Registry::current() = t.name;
        t.fn();
        const bool ok = testing::Registry::failures() == before;
        std::printf("%s %s\n", ok ? "PASS" : "FAIL", t.name);
        if (!ok)
            ++failed_tests;
    }
    std::printf("%zu tests, %d failed\n", testing::Registry::all().size(), failed_tests);
    return failed_tests == 0 ? 0 : 1;
}

#define TEST_MAIN()                                                                      \
    int main() { return run_all_tests(); }
