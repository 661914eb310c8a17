// SPDX-License-Identifier: Apache-2.0
//
// Prints one PASS/FAIL line per acceptance criterion; exits non-zero when
// any criterion fails.

#include "smomp/selftest.hpp"

#include <filesystem>
#include <iostream>

int main()
{
    using namespace smomp;
    ResidualAudit audit;
    const auto scratch = std::filesystem::temp_directory_path() / "smomp_acceptance";
    std::filesystem::remove_all(scratch);

    struct Line {
        int id;
        const char* name;
        CheckResult result;
    };
    std::vector<Line> lines;
    auto emit = [&](int id, const char* name, CheckResult r) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << r.detail << std::endl;
        lines.push_back({id, name, std::move(r)});
    };

    emit(1, "oracle equivalence", check_oracle_equivalence(120, audit));
    emit(2, "OMP reduction", check_omp_reduction(100, audit));
    emit(3, "formulation equivalence", check_formulation_equivalence());
    emit(4, "exact recovery", check_exact_recovery(50, audit));
    emit(5, "memory contract", check_memory_contract());
    emit(6, "speed ordering", check_speed_ordering(10));
    emit(7, "statistical whitening", check_whitening(10000));
    emit(8, "residual properties", audit.result());
    emit(9, "localization sanity", check_localization(50));
    emit(10, "determinism", check_determinism(scratch));
    std::filesystem::remove_all(scratch);

    std::size_t passed = 0;
    for (const auto& l : lines)
        passed += l.result.pass ? 1 : 0;
    std::cout << passed << "/" << lines.size() << " criteria passed" << std::endl;
    return passed == lines.size() ? 0 : 1;
}
