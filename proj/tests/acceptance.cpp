// Acceptance gate: runs the full cross-check suite and prints one pass/fail
// line per criterion. Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "treedyn/parallel.hpp"
#include "treedyn/verify.hpp"

int main(int argc, char** argv) {
    treedyn::verify::SuiteOptions opts;
    opts.full = true;
    opts.workers = treedyn::max_workers();
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--fast") == 0) opts.full = false;
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
            opts.seed = std::strtoull(argv[++i], nullptr, 10);
    }

    const auto results = treedyn::verify::run_suite(opts);

    std::map<int, std::vector<const treedyn::verify::CheckResult*>> by_criterion;
    for (const auto& r : results) by_criterion[r.criterion].push_back(&r);

    bool all_ok = true;
    for (const auto& [criterion, checks] : by_criterion) {
        bool ok = true;
        std::string detail;
        for (const auto* c : checks) {
            ok = ok && c->pass;
            if (!detail.empty()) detail += "; ";
            detail += c->id + "=" + (c->pass ? "pass" : "FAIL (" + c->measured +
                                                            ", need " +
                                                            c->requirement + ")");
        }
        all_ok = all_ok && ok;
        std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion,
                    detail.c_str());
    }
    std::printf("%s\n", all_ok ? "ALL CRITERIA PASSED" : "ACCEPTANCE FAILED");
    return all_ok ? 0 : 1;
}
