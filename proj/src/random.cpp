#include "liftmmap/random.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace liftmmap {

int Rng::integer(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(gen_() % span);
}

double Rng::real(double lo, double hi) {
  const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

bool Rng::chance(double p) { return real(0.0, 1.0) < p; }

namespace {

ExprPtr random_formula(Rng& rng, const MLN& m, const RandomMlnOptions& opts) {
  const int literals = rng.integer(1, opts.maxLiterals);
  std::vector<std::pair<std::string, std::string>> vars;  // name, domain
  std::vector<ExprPtr> lits;
  for (int l = 0; l < literals; ++l) {
    const auto& p = m.predicates[rng.integer(0, static_cast<int>(m.predicates.size()) - 1)];
    std::vector<std::string> args;
    for (const auto& d : p.argDomains) {
      std::vector<std::string> reusable;
      for (const auto& [name, dom] : vars)
        if (dom == d && std::find(args.begin(), args.end(), name) == args.end())
          reusable.push_back(name);
      if (!reusable.empty() && rng.chance(0.6)) {
        args.push_back(reusable[rng.integer(0, static_cast<int>(reusable.size()) - 1)]);
      } else {
        std::string v = "v" + std::to_string(vars.size());
        vars.emplace_back(v, d);
        args.push_back(v);
      }
    }
    ExprPtr a = Expr::atom(p.name, std::move(args));
    lits.push_back(rng.chance(0.5) ? Expr::unary(Op::Not, a) : a);
  }
  if (lits.size() == 1) return lits[0];
  switch (rng.integer(0, lits.size() == 2 ? 3 : 2)) {
    case 0:
      return Expr::nary(Op::Or, lits);
    case 1:
      return Expr::nary(Op::And, lits);
    case 2: {
      ExprPtr head = lits.back();
      lits.pop_back();
      ExprPtr body = lits.size() == 1 ? lits[0] : Expr::nary(Op::And, lits);
      return Expr::nary(Op::Implies, {body, head});
    }
    default:
      return Expr::nary(Op::Equiv, lits);
  }
}

}  // namespace

MLN random_mln(std::uint64_t seed, const RandomMlnOptions& opts) {
  Rng rng(seed);
  while (true) {
    MLN m;
    const int nd = rng.integer(1, opts.maxDomains);
    for (int d = 0; d < nd; ++d)
      m.domains.push_back({"d" + std::to_string(d), rng.integer(1, opts.maxDomainSize)});
    const int np = rng.integer(1, opts.maxPredicates);
    long double atoms = 0;
    for (int i = 0; i < np; ++i) {
      Predicate p;
      p.name = std::string(1, static_cast<char>('P' + i));
      const int arity = rng.integer(0, opts.maxArity);
      for (int a = 0; a < arity; ++a) p.argDomains.push_back(m.domains[rng.integer(0, nd - 1)].name);
      p.role = rng.chance(opts.maxProbability) ? Role::Max : Role::Sum;
      std::vector<int> sizes;
      for (const auto& d : p.argDomains) sizes.push_back(m.domain_size(d));
      p.origin = identity_origin(p.name, sizes);
      atoms += m.groundings(p);
      m.predicates.push_back(std::move(p));
    }
    const int nf = rng.integer(1, opts.maxFormulas);
    for (int f = 0; f < nf; ++f)
      m.formulas.push_back(make_formula(rng.real(opts.minWeight, opts.maxWeight), random_formula(rng, m, opts)));
    if (atoms > opts.maxGroundAtoms) continue;
    return m;
  }
}

}  // namespace liftmmap
