"""Look at the seeds each scheme produces for a two-objective problem.

CornersAndCentre spends 10^4 evaluations on three CMA-ES runs; the first two
lean towards one objective each, the third weights both equally.
LinearCombinations spends 10^3 evaluations on each of 100 weight vectors.
"""

import numpy as np

from moseed.core import make_rng
from moseed.metrics import minimization_alpha, reference_front
from moseed.problems import get_problem
from moseed.seeding import generate_seeds

problem = get_problem("zdt1")
front = reference_front(problem, 10_000)

for scheme in ("CornersAndCentre", "LinearCombinations"):
    seeds = generate_seeds(problem, scheme, make_rng(7))
    print(f"{scheme}: {len(seeds)} seeds, {seeds.evals_consumed} evaluations, "
          f"alpha of the seed set {minimization_alpha(front, seeds.F):.4f}")
    for w, f in list(zip(seeds.weight_vectors, seeds.F))[:5]:
        print(f"  weights {tuple(int(v) for v in w)} -> f = {np.round(f, 4)}")
