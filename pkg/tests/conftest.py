import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fracperiodic.trig_field import PeriodicFunction

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

coef = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)


@st.composite
def trig_polys(draw, max_modes=16, mean=True):
    n = draw(st.integers(1, max_modes))
    a = np.array(draw(st.lists(coef, min_size=n, max_size=n)))
    b = np.array(draw(st.lists(coef, min_size=n, max_size=n)))
    a0 = draw(coef) if mean else 0.0
    return PeriodicFunction(a0, a, b)


orders = st.floats(0.51, 0.99)
