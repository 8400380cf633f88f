import numpy as np
import pytest

from polylap import extremum, spectrum
from polylap.cyclic import assemble_cyclic, cot_vector, regular_profile


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay numba compilation once, before anything timed runs
    L = assemble_cyclic(cot_vector(regular_profile(4)))
    spectrum.eigenvalues(L)
    spectrum._batch_eigenvalues(np.ascontiguousarray(np.stack([L.entries] * 2)))
    p = regular_profile(4)
    for obj in extremum.Objective:
        extremum.evaluate(obj, p)
        if obj is not extremum.Objective.LAMBDA1:
            extremum.gradient(obj, p)
            extremum.minimize(obj, p)
