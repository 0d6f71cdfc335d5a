import math

import numpy as np
from hypothesis import strategies as hs

from qpennyflip.qmat import DensityMatrix

ANGLE_T = hs.floats(0.0, math.pi / 2)
ANGLE_P = hs.floats(0.0, math.pi)
PROB = hs.floats(0.0, 1.0)


@hs.composite
def density_matrices(draw):
    """Random valid states: a Bloch vector inside the unit ball."""
    r = draw(hs.floats(0.0, 1.0))
    t = draw(hs.floats(0.0, math.pi))
    f = draw(hs.floats(0.0, 2 * math.pi))
    x, y, z = r * math.sin(t) * math.cos(f), r * math.sin(t) * math.sin(f), r * math.cos(t)
    return DensityMatrix(0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]]))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
