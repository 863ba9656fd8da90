#pragma once

namespace gtg {

// Every OpenMP kernel in this library has a serial twin that produces
// bitwise-identical output: work is only ever split across independent output
// elements (matrix entries, profile rows, patches), never across the terms of
// a single floating-point reduction. Tests assert exact equality of the two
// paths, and the bench tool compares their runtimes.
enum class ExecMode { serial, parallel };

// Number of threads a parallel region may use (1 when built without OpenMP).
int max_threads();

}  // namespace gtg
