"""How the additive approximation constant reads.

A population approximates a front with constant alpha when every front
point is within alpha of some population point in every objective. Smaller
is better; 0 means the population covers the front.
"""

import numpy as np

from moseed.metrics import minimization_alpha, reference_front
from moseed.problems import get_problem

front = np.array([(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)])

print("front itself:        ", minimization_alpha(front, front))
print("front shifted by 0.2:", minimization_alpha(front, front + 0.2))
# losing the middle point costs the distance to its nearest neighbour
print("corners only:        ", minimization_alpha(front, front[[0, 2]]))

problem = get_problem("zdt1")
sample = reference_front(problem, 10_000)
rng = np.random.default_rng(1)
random_pop = problem.evaluate(problem.bounds.sample(rng, 100))
print(f"100 random ZDT1 points: alpha = {minimization_alpha(sample, random_pop):.3f}")
