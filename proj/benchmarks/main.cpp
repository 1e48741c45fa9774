#include <benchmark/benchmark.h>

// benchmark_main.a ships as an LTO archive tied to one compiler build; the shared library is portable.
BENCHMARK_MAIN();
