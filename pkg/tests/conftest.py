import pytest

from grrforge import matgrp, smallgrp


@pytest.fixture(scope="session")
def table():
    """Memoized desk-scale tables keyed by (family, n, q)."""
    made = {}

    def get(family, n, q):
        key = (family, n, q)
        if key not in made:
            made[key] = smallgrp.enumerate_group(matgrp.make_spec(family, n, q))
        return made[key]

    return get
