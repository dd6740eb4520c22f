import pytest

from mprwlan import default_params, derive_timings
from mprwlan.timing import PhyMacParams, _DEFAULTS


@pytest.fixture(scope="session")
def timings54():
    """Default 802.11a-style timings (54 Mbps data rate)."""
    return derive_timings(default_params())


@pytest.fixture(scope="session")
def timings6():
    """Same parameter set but with the data rate dropped to 6 Mbps."""
    values = dict(_DEFAULTS)
    values["data_rate_bps"] = 6e6
    return derive_timings(PhyMacParams(**values))
