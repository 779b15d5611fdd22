// Cross-section of the cone C(h_5) at trace 1: exact vertices, the sampled
// inner approximation, Weyl invariance and a containment audit.

#include "rnlie/cone.hpp"
#include "rnlie/corpus.hpp"

#include <iostream>

using namespace rnlie;

int main(int argc, char** argv) {
  const std::string name = argc > 1 ? argv[1] : "heisenberg:5";
  const std::uint64_t seed = default_seed();
  try {
    auto entry = corpus(name);
    Bracket b = entry.numeric();
    auto exact = cone_section_exact(entry.bracket, Rational(1));
    std::cout << name << ": torus dimension " << exact.torus.dim() << ", section dimension " << exact.dim << "\n";
    std::cout << "exact vertices (torus coordinates -> diagonal):\n";
    for (std::size_t v = 0; v < exact.vertices_exact.size(); ++v) {
      std::cout << "  (";
      for (std::size_t j = 0; j < exact.vertices_exact[v].size(); ++j) std::cout << (j ? ", " : "") << format_rational(exact.vertices_exact[v][j]);
      std::cout << ") -> diag(";
      auto d = exact.torus.diagonal(exact.vertices_exact[v]);
      for (std::size_t i = 0; i < d.size(); ++i) std::cout << (i ? ", " : "") << format_rational(d[i]);
      std::cout << ")\n";
    }
    std::cout << "edges " << exact.edges.size() << ", combinatorial " << exact.dim << "-cube: " << (exact.is_hypercube() ? "yes" : "no") << "\n";

    auto w = orthogonal_weyl_group(entry.bracket, exact.torus);
    auto rep = weyl_invariance_check(exact, w);
    std::cout << "Weyl group: " << w.induced.size() << " induced actions, invariant: " << (rep.invariant ? "yes" : "no") << "\n";

    auto sampled = cone_section_sampled(b, 1.0, 32, seed);
    double gap = 0.0;
    for (const auto& v : sampled.vertices) gap = std::max(gap, poly::hull_distance(exact.vertices, v));
    std::cout << "sampled inner section: " << sampled.vertices.size() << " vertices, max distance to the exact section " << format_double(gap)
              << "\n";

    auto audit = containment_audit(b, exact, 8, seed);
    std::cout << "containment audit: " << audit.witnessed << "/" << audit.probes - audit.excluded
              << " interior points carry a Ricci negative metric (worst lambda_max " << format_double(audit.worst_lambda) << ")\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
