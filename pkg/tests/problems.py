"""Reference problems shared by the tests."""

import math

from retarded_sl.cli import EXAMPLE_CONFIGS
from retarded_sl.problem import ProblemSpec

# q = 0, no delay: phi = mu cos(mu t), Xi = mu^3 sin(mu pi)
T0 = ProblemSpec(theta=(math.pi / 2,), delta=(1.0,), a1m=0, a1p=0, a2m=0, a2p=1,
                 b1m=0, b1p=0, b2m=0, b2p=1, q="0", delay="0", name="t0")
# q = 1: phi = mu cos(w t) with w = sqrt(mu^2 + 1)
T1 = T0.replace(q="1", name="t1")
T2 = T0.replace(a1p=1.0, name="t2")
E1 = ProblemSpec.from_dict(EXAMPLE_CONFIGS["example1"])
E2 = ProblemSpec.from_dict(EXAMPLE_CONFIGS["example2"])
