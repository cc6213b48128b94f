// Prints a few almost-inner witnesses for t = 1/4 and the lowest even
// eigenvalues of the N = 4 grid operator for t = 0 and t = 1/4.

#include "orbispec/orbispec.hpp"

#include <cstdio>

using namespace orbispec;

int main()
{
  const Rational t = make_rational(1, 4);
  for (auto g : {LatticeElement::from_ints(0, 0, 0, 1, 0, 0), LatticeElement::from_ints(0, 0, 1, 1, 0, 0),
                 LatticeElement::from_ints(1, 0, 2, 3, 0, 1)}) {
    WitnessCertificate w = almost_inner_witness(t, g);
    std::printf("gamma %-28s a %-28s verified %s\n", g.element().str().c_str(), w.a ? w.a->str().c_str() : "-",
                w.verified ? "yes" : "no");
  }

  for (double tv : {0.0, 0.25}) {
    SpectrumResult r = dense_parity_spectrum(DiscreteOperator(Scheme{MetricFamily::almost_inner, tv}, 4), Parity::even);
    std::printf("t = %.2f, N = 4, even:", tv);
    for (std::size_t i = 0; i < 8; ++i)
      std::printf(" %.4f", r.values[i]);
    std::printf("\n");
  }
  return 0;
}
