// Walks the symmetric three-species family through its four regimes and
// prints the fixed points with their types and where an interior orbit ends up.

#include <cstdio>

#include "ellvolterra/ellvolterra.hpp"

using namespace ellvolterra;

int main() {
    const M3SymParams cases[] = {{0.5, 0.5, 0.25}, {0.5, 0.5, 0.75}, {0.8, 0.2, 0.75}, {0.6, 0.3, 0.75}};
    const SimplexPoint start{0.2, 0.3, 0.5};
    for (const auto& p : cases) {
        const M3Report r = m3_analyze(p);
        std::printf("a=%.2f b=%.2f c=%.2f  regime %s\n", p.a, p.b, p.c, to_string(r.regime).c_str());
        for (const auto& [name, fp] : r.fixed_points)
            std::printf("  %-8s (%.6f, %.6f)  %s\n", name.c_str(), fp.location[0], fp.location[1],
                        to_string(fp.type).c_str());
        if (r.fixed_line_level) std::printf("  fixed line x + y = %.6f\n", *r.fixed_line_level);
        const SimplexPoint end = iterate(m3_operator(p), start, 5000);
        std::printf("  orbit from (0.2, 0.3) -> (%.6f, %.6f)\n\n", end[0], end[1]);
    }
    return 0;
}
