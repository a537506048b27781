import numpy as np
import pytest

from tumor_interface.spectral import SpectralField


def random_field(rng, grid_size=32, amp=1.0, decay=0.0, n_modes=None, mean=True):
    """Random real field; ``n_modes`` limits the populated wavenumbers."""
    kh = grid_size // 2
    c = amp * (rng.standard_normal(kh) + 1j * rng.standard_normal(kh))
    c *= np.exp(-decay * np.arange(kh))
    if n_modes is not None:
        c[n_modes + 1:] = 0
    c[0] = c[0].real if mean else 0.0
    return SpectralField(c, grid_size)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def rfield(rng):
    def make(*args, **kw):
        return random_field(rng, *args, **kw)
    return make


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
