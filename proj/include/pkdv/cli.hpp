#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pkdv::cli {

// Everything a command can read. A JSON config file may set any of these
// (keys as below, with x_min style names); explicit flags win over it.
struct RunConfig {
    std::string command;
    double rho = 1.0;
    std::optional<double> eps;
    double x_min = -5.0, x_max = 5.0;
    int nx = 101;
    std::vector<double> t;
    double h = 0.0;
    int nodes = 0;
    std::string out;
    std::string format = "csv";

    std::string suite = "all";
    double perturb_c = 0.0;

    std::string kind = "Q";

    std::string u0 = "soliton";
    double T = 1.0, L = 0.0, dt = 1e-4;
    int N = 0;
    bool dealias = false;

    std::string a, b;
    double window_min = -8.0, window_max = 8.0, tol = 5e-3;
};

// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical failure. Diagnostics on err are one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pkdv::cli
